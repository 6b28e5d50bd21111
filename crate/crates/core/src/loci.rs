//! Monomial-times-unit factorization and the sufficient minor criteria for normal crossings.

use std::fmt;

use crate::algebra::matrix::{combinations, det, submatrix};
use crate::algebra::{Exps, Poly, RatFun};
use crate::hull::{apply_word, format_word, SpanChain};
use crate::structure::{theta_of_b, KernelVector, StructureDef};
use crate::Error;

/// Upper bound on the number of hull generators entering the degeneracy minor search.
pub const MAX_DEGENERACY_ROWS: usize = 16;

/// `p = x^alpha · unit` with `unit(0) ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialUnitFactor {
    pub alpha: Exps,
    pub unit: Poly,
}

impl MonomialUnitFactor {
    pub fn reconstruct(&self) -> Poly {
        self.unit.mul_monomial(&self.alpha)
    }

    pub fn monomial_string(&self) -> String {
        let names = self.unit.vars().names();
        let parts: Vec<String> = self
            .alpha
            .iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{}^{}", n, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

pub fn monomial_unit_factor(p: &Poly) -> Result<MonomialUnitFactor, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let alpha = p.min_exponents();
    let unit = p.div_monomial(&alpha).expect("minimum exponents divide every term");
    if unit.constant_term().is_zero() {
        return Err(Error::NotMonomialTimesUnit);
    }
    Ok(MonomialUnitFactor { alpha, unit })
}

/// A minor that factors as monomial times unit.
#[derive(Clone, Debug)]
pub struct MinorWitness {
    /// Row labels of the minor (φ_t rows, or hull generator descriptions).
    pub rows: Vec<String>,
    pub cols: Vec<usize>,
    pub minor: RatFun,
    pub factor: MonomialUnitFactor,
}

#[derive(Clone, Debug)]
pub enum LocusVerdict {
    Yes(Option<MinorWitness>),
    NotEstablished,
}

impl LocusVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, LocusVerdict::Yes(_))
    }
}

impl fmt::Display for LocusVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocusVerdict::Yes(None) => write!(f, "Yes (no minors required)"),
            LocusVerdict::Yes(Some(w)) => write!(
                f,
                "Yes via rows [{}] minor {} = {} * ({})",
                w.rows.join(", "),
                w.minor,
                w.factor.monomial_string(),
                w.factor.unit
            ),
            LocusVerdict::NotEstablished => write!(f, "NotEstablished"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LociReport {
    pub exceptional: LocusVerdict,
    pub degeneracy: LocusVerdict,
}

/// Factors a rational minor: numerator monomial × unit and denominator nonvanishing at 0.
fn factor_minor(m: &RatFun) -> Option<MonomialUnitFactor> {
    if m.den().constant_term().is_zero() {
        return None;
    }
    monomial_unit_factor(m.num()).ok()
}

/// Searches the μ×μ minors of φ_t in lexicographic row order.
pub fn exceptional_locus_check(def: &StructureDef) -> LocusVerdict {
    let mu = def.mu();
    if mu == 0 {
        return LocusVerdict::Yes(None);
    }
    let pt = &def.jacobians().phi_t;
    let cols: Vec<usize> = (0..mu).collect();
    for rows in combinations(def.d(), mu) {
        let minor = det(&submatrix(pt, &rows, &cols));
        if let Ok(factor) = monomial_unit_factor(&minor) {
            return LocusVerdict::Yes(Some(MinorWitness {
                rows: rows.iter().map(|r| format!("phi{}", r + 1)).collect(),
                cols,
                minor: RatFun::from_poly(minor),
                factor,
            }));
        }
    }
    LocusVerdict::NotEstablished
}

/// Exact hull generator rows `(cz, cw)` with labels, deduplicated up to constant multiples.
pub fn degeneracy_rows(
    def: &StructureDef,
    kernel: &[KernelVector],
    chain: &SpanChain,
) -> Vec<(String, Vec<RatFun>)> {
    let level = chain.nondeg_order.unwrap_or(chain.k_max);
    let seeds: Vec<Vec<RatFun>> = kernel
        .iter()
        .map(|kv| {
            let th = theta_of_b(def, &kv.b);
            th.cz.into_iter().chain(th.cw).collect()
        })
        .collect();
    let mut rows: Vec<(String, Vec<RatFun>)> = Vec::new();
    for g in chain.generators_through(level) {
        if rows.len() >= MAX_DEGENERACY_ROWS {
            break;
        }
        let r = apply_word(def, &g.word, &seeds[g.seed]);
        if r.iter().all(|c| c.is_zero()) || rows.iter().any(|(_, q)| proportional(q, &r)) {
            continue;
        }
        rows.push((format!("{} theta{}", format_word(&g.word), g.seed + 1), r));
    }
    rows
}

fn proportional(a: &[RatFun], b: &[RatFun]) -> bool {
    let Some(i) = a.iter().position(|c| !c.is_zero()) else {
        return b.iter().all(|c| c.is_zero());
    };
    if b[i].is_zero() {
        return false;
    }
    let Some(ratio) = b[i].checked_div(&a[i]) else { return false };
    if !ratio.den().is_constant() || !ratio.num().is_constant() {
        return false;
    }
    a.iter().zip(b).all(|(x, y)| &(x * &ratio) == y)
}

/// Searches `(ν+d)`-row minors of the hull generator matrix for a monomial-times-unit factorization.
pub fn degeneracy_locus_check(def: &StructureDef, kernel: &[KernelVector], chain: &SpanChain) -> LocusVerdict {
    let m = def.corank();
    let rows = degeneracy_rows(def, kernel, chain);
    if m == 0 {
        return LocusVerdict::Yes(None);
    }
    if rows.len() < m {
        return LocusVerdict::NotEstablished;
    }
    let matrix: Vec<Vec<RatFun>> = rows.iter().map(|(_, r)| r.clone()).collect();
    let cols: Vec<usize> = (0..m).collect();
    for sel in combinations(rows.len(), m) {
        let minor = det(&submatrix(&matrix, &sel, &cols));
        if minor.is_zero() {
            continue;
        }
        if let Some(factor) = factor_minor(&minor) {
            return LocusVerdict::Yes(Some(MinorWitness {
                rows: sel.iter().map(|&i| rows[i].0.clone()).collect(),
                cols,
                minor,
                factor,
            }));
        }
    }
    LocusVerdict::NotEstablished
}

pub fn loci_report(def: &StructureDef, kernel: &[KernelVector], chain: &SpanChain) -> LociReport {
    LociReport { exceptional: exceptional_locus_check(def), degeneracy: degeneracy_locus_check(def, kernel, chain) }
}
