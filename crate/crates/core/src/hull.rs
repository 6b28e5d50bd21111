//! Lie derivatives on T′ and the ascending chains deciding nondegeneracy at the base point.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{ratfun_jet, Exps, GaussRat, Jet, RatFun};
use crate::algebra::matrix::exact_rank;
use crate::structure::{theta_of_b, CotangentSection, KernelVector, StructureDef, VectorFieldSym};
use crate::Error;

/// Default jet order for chain computations.
pub const DEFAULT_K_MAX: usize = 8;

/// `ℒ_L ω` for the frame field `L_index`: componentwise application of L in the first-integral coframe.
pub fn lie_derivative(def: &StructureDef, index: usize, omega: &CotangentSection) -> CotangentSection {
    lie_derivative_along(&def.frame()[index], omega)
}

/// `ℒ_L ω` for any section `L` of the structure bundle.
pub fn lie_derivative_along(l: &VectorFieldSym, omega: &CotangentSection) -> CotangentSection {
    CotangentSection {
        cz: omega.cz.iter().map(|c| l.apply(c)).collect(),
        cw: omega.cw.iter().map(|c| l.apply(c)).collect(),
    }
}

/// Applies the word `L_{w[0]} L_{w[1]} ⋯ L_{w[m−1]}` (rightmost letter acts first) to exact components.
pub fn apply_word(def: &StructureDef, word: &[usize], comps: &[RatFun]) -> Vec<RatFun> {
    let frame = def.frame();
    let mut cur = comps.to_vec();
    for &i in word.iter().rev() {
        cur = cur.iter().map(|c| frame[i].apply(c)).collect();
    }
    cur
}

/// Value at the origin of a word applied to exact components.
pub fn word_value_at_0(def: &StructureDef, word: &[usize], comps: &[RatFun]) -> Result<Vec<GaussRat>, Error> {
    apply_word(def, word, comps)
        .iter()
        .map(|c| c.value_at_origin().ok_or(Error::DenominatorVanishesAtBase))
        .collect()
}

/// Formats a word as `L1 L2^3`.
pub fn format_word(word: &[usize]) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let mut j = i;
        while j < word.len() && word[j] == word[i] {
            j += 1;
        }
        let e = j - i;
        parts.push(if e == 1 { format!("L{}", word[i] + 1) } else { format!("L{}^{}", word[i] + 1, e) });
        i = j;
    }
    parts.join(" ")
}

/// A chain generator: a word applied to the seed with index `seed`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub seed: usize,
    pub word: Vec<usize>,
    pub components: Vec<Jet>,
}

impl Generator {
    pub fn value_at_0(&self) -> Vec<GaussRat> {
        self.components.iter().map(|c| c.constant_term().unwrap_or_else(GaussRat::zero)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub level: usize,
    /// Generators first kept at this level.
    pub new_generators: Vec<Generator>,
    pub span_dim_at_0: usize,
}

/// Ascending chain of spans at the origin.
#[derive(Clone, Debug)]
pub struct SpanChain {
    pub k_max: usize,
    pub target_dim: usize,
    pub levels: Vec<ChainLevel>,
    pub nondeg_order: Option<usize>,
    /// Levels at which the span at 0 did not grow (before reaching the target).
    pub stalls: Vec<usize>,
}

/// The F-chain has the same shape, on the b-components only.
pub type FChain = SpanChain;

impl SpanChain {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.span_dim_at_0).collect()
    }

    /// All kept generators up to and including `level`.
    pub fn generators_through(&self, level: usize) -> Vec<&Generator> {
        self.levels.iter().take(level + 1).flat_map(|l| l.new_generators.iter()).collect()
    }
}

impl fmt::Display for SpanChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.levels {
            writeln!(f, "k={} span_dim={}", l.level, l.span_dim_at_0)?;
        }
        match self.nondeg_order {
            Some(k) => write!(f, "nondeg_order={}", k),
            None => write!(f, "nondeg_order=Undetermined"),
        }
    }
}

type Key = (usize, Exps);

/// Reduced row echelon form over sparse keyed vectors.
struct SparseEchelon {
    rows: Vec<(Key, BTreeMap<Key, GaussRat>)>,
}

impl SparseEchelon {
    fn new() -> Self {
        SparseEchelon { rows: Vec::new() }
    }

    fn reduce(&self, mut v: BTreeMap<Key, GaussRat>) -> BTreeMap<Key, GaussRat> {
        for (pk, row) in &self.rows {
            let Some(c) = v.get(pk).cloned() else { continue };
            for (k, x) in row {
                let e = v.entry(k.clone()).or_insert_with(GaussRat::zero);
                *e -= &(&c * x);
                if e.is_zero() {
                    v.remove(k);
                }
            }
        }
        v
    }

    /// Inserts `v` if independent; returns whether it was.
    fn insert(&mut self, v: BTreeMap<Key, GaussRat>) -> bool {
        let r = self.reduce(v);
        let Some((pk, pc)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = pc.inv().expect("nonzero pivot");
        let r: BTreeMap<Key, GaussRat> = r.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        for (_, row) in self.rows.iter_mut() {
            let Some(c) = row.get(&pk).cloned() else { continue };
            for (k, x) in &r {
                let e = row.entry(k.clone()).or_insert_with(GaussRat::zero);
                *e -= &(&c * x);
                if e.is_zero() {
                    row.remove(k);
                }
            }
        }
        self.rows.push((pk, r));
        true
    }
}

fn keyed(components: &[Jet], order: i32) -> BTreeMap<Key, GaussRat> {
    let mut m = BTreeMap::new();
    if order < 0 {
        return m;
    }
    for (i, c) in components.iter().enumerate() {
        for (e, x) in c.terms() {
            if crate::algebra::poly::total_degree(e) as i32 <= order {
                m.insert((i, e.clone()), x.clone());
            }
        }
    }
    m
}

/// Frame coefficients expanded to jets of order `k`.
fn frame_jets(def: &StructureDef, k: usize) -> Result<Vec<Vec<Jet>>, Error> {
    def.frame()
        .iter()
        .map(|l| l.coeffs().iter().map(|c| ratfun_jet(c, k as u32)).collect())
        .collect()
}

fn apply_jet_field(field: &[Jet], f: &Jet) -> Jet {
    let mut acc: Option<Jet> = None;
    for (c, a) in field.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = a.mul(&f.derivative(c));
        acc = Some(match acc {
            None => term,
            Some(x) => x.add(&term),
        });
    }
    acc.unwrap_or_else(|| {
        let o = f.order().map(|o| o.saturating_sub(1)).unwrap_or(0);
        Jet::zero(f.vars(), o)
    })
}

/// Generic chain: seeds are component vectors; levels apply frame fields to newly kept generators.
fn run_chain(def: &StructureDef, seeds: Vec<Vec<RatFun>>, k_max: usize, target: usize) -> Result<SpanChain, Error> {
    let fj = frame_jets(def, k_max)?;
    let mut levels: Vec<ChainLevel> = Vec::new();
    let mut values_at_0: Vec<Vec<GaussRat>> = Vec::new();
    let mut kept: Vec<Generator> = Vec::new();
    let mut frontier: Vec<Generator> = Vec::new();
    let mut stalls = Vec::new();
    let mut nondeg_order = None;
    let mut saturated = false;
    for level in 0..=k_max {
        let order = (k_max - level) as i32;
        let candidates: Vec<Generator> = if level == 0 {
            seeds
                .iter()
                .enumerate()
                .map(|(seed, comps)| {
                    let components =
                        comps.iter().map(|c| ratfun_jet(c, k_max as u32)).collect::<Result<Vec<_>, _>>()?;
                    Ok(Generator { seed, word: Vec::new(), components })
                })
                .collect::<Result<_, Error>>()?
        } else if saturated {
            Vec::new()
        } else {
            let mut out = Vec::new();
            for g in &frontier {
                for (i, field) in fj.iter().enumerate() {
                    let mut word = vec![i];
                    word.extend_from_slice(&g.word);
                    let components = g.components.iter().map(|c| apply_jet_field(field, c)).collect();
                    out.push(Generator { seed: g.seed, word, components });
                }
            }
            out.sort_by(|a, b| a.word.cmp(&b.word).then(a.seed.cmp(&b.seed)));
            out
        };
        let mut ech = SparseEchelon::new();
        for g in &kept {
            ech.insert(keyed(&g.components, order));
        }
        let mut new_gens = Vec::new();
        for g in candidates {
            if ech.insert(keyed(&g.components, order)) {
                new_gens.push(g);
            }
        }
        for g in &new_gens {
            values_at_0.push(g.value_at_0());
        }
        let dim = exact_rank(&values_at_0);
        if let Some(prev) = levels.last() {
            if dim == prev.span_dim_at_0 && dim < target {
                stalls.push(level);
            }
        }
        if dim >= target && nondeg_order.is_none() {
            nondeg_order = Some(level);
            saturated = true;
        }
        kept.extend(new_gens.iter().cloned());
        frontier = new_gens.clone();
        levels.push(ChainLevel { level, new_generators: new_gens, span_dim_at_0: dim });
    }
    Ok(SpanChain { k_max, target_dim: target, levels, nondeg_order, stalls })
}

/// Hull chain of the characteristic forms θ_b.
pub fn hull_chain(def: &StructureDef, kernel: &[KernelVector], k_max: usize) -> Result<SpanChain, Error> {
    let seeds = kernel
        .iter()
        .map(|kv| {
            let th = theta_of_b(def, &kv.b);
            th.cz.into_iter().chain(th.cw).collect()
        })
        .collect();
    run_chain(def, seeds, k_max, def.corank())
}

/// Chain of `L^α b|_0` in ℂ^d.
pub fn f_chain(def: &StructureDef, kernel: &[KernelVector], k_max: usize) -> Result<FChain, Error> {
    let seeds = kernel.iter().map(|kv| kv.b.iter().cloned().map(RatFun::from_poly).collect()).collect();
    run_chain(def, seeds, k_max, def.d())
}

/// The necessary condition: a full hull at level k forces a full F-chain by level k.
pub fn f_chain_consistent(hull: &SpanChain, f: &FChain) -> bool {
    match (hull.nondeg_order, f.nondeg_order) {
        (Some(h), Some(fo)) => fo <= h,
        (Some(_), None) => false,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;
    use crate::structure::fixtures::*;
    use crate::structure::{kernel_vectors, KernelMode};

    #[test]
    fn closed_forms_have_zero_derivative() {
        let def = power_curve(1, 2);
        let om = CotangentSection::dw(&def, 1);
        assert!(lie_derivative(&def, 0, &om).is_zero());
    }

    #[test]
    fn power_curve_lie_derivative() {
        let (k, l) = (2u32, 3u32);
        let def = power_curve(k, l);
        let t = Poly::var(def.vars(), def.t(0));
        let mut om = CotangentSection::zero(&def);
        om.cw[0] = RatFun::from_poly(t.pow(k));
        om.cw[1] = RatFun::from_poly(-&t.pow(l));
        let d = lie_derivative(&def, 0, &om);
        assert_eq!(d.cw[0].as_poly().unwrap(), t.pow(k - 1).scale(&GaussRat::from_int(k as i64)));
        assert_eq!(d.cw[1].as_poly().unwrap(), t.pow(l - 1).scale(&GaussRat::from_int(-(l as i64))));
    }

    #[test]
    fn mizohata_lie_derivative_of_s() {
        let def = mizohata(&[1]);
        let v = def.vars();
        let mut om = CotangentSection::zero(&def);
        om.cw[0] = RatFun::from_poly(Poly::var(v, def.s(0)));
        let d = lie_derivative(&def, 0, &om);
        let t = Poly::var(v, def.t(0));
        assert_eq!(d.cw[0].as_poly().unwrap(), t.scale(&GaussRat::complex(0, -1)));
    }

    #[test]
    fn power_curve_order_two() {
        let def = power_curve(1, 2);
        let ks = kernel_vectors(&def, KernelMode::Auto).unwrap();
        let ch = hull_chain(&def, &ks.vectors, 8).unwrap();
        assert_eq!(ch.nondeg_order, Some(2));
        assert_eq!(&ch.dims()[..3], &[0, 1, 2]);
        let fc = f_chain(&def, &ks.vectors, 8).unwrap();
        assert_eq!(fc.nondeg_order, Some(2));
        assert!(f_chain_consistent(&ch, &fc));
    }

    #[test]
    fn flat_constant_b() {
        let def = levi_flat(1, 1);
        let ks = kernel_vectors(&def, KernelMode::Auto).unwrap();
        let fc = f_chain(&def, &ks.vectors, 3).unwrap();
        assert_eq!(fc.nondeg_order, Some(0));
    }

    #[test]
    fn word_format() {
        assert_eq!(format_word(&[0, 1, 1, 1]), "L1 L2^3");
        assert_eq!(format_word(&[]), "1");
    }
}
