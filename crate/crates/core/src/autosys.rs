//! The linear PDE system for infinitesimal automorphisms, `L_i(dF(X)) = 0` for every first integral F.

use std::fmt;

use crate::algebra::{Poly, RatFun};
use crate::structure::StructureDef;
use crate::Error;

/// A real polynomial vector field `Σ X_q ∂/∂u_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealVectorFieldSym {
    coeffs: Vec<Poly>,
}

impl RealVectorFieldSym {
    pub fn new(coeffs: Vec<Poly>) -> Result<Self, Error> {
        if let Some(q) = coeffs.iter().position(|p| !p.is_real()) {
            return Err(Error::InvalidStructure(format!("candidate coefficient {} is not real", q + 1)));
        }
        Ok(RealVectorFieldSym { coeffs })
    }

    pub fn zero(def: &StructureDef) -> Self {
        RealVectorFieldSym { coeffs: vec![Poly::zero(def.vars()); def.n_coords()] }
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// `coeff · ∂X_unknown/∂u_deriv` (or `coeff · X_unknown` when `deriv` is `None`).
#[derive(Clone, Debug)]
pub struct PdeTerm {
    pub unknown: usize,
    pub deriv: Option<usize>,
    pub coeff: Poly,
}

#[derive(Clone, Debug)]
pub struct PdeEquation {
    /// Index of the first integral (Z's first, then W's).
    pub integral: usize,
    /// Index of the frame field.
    pub field: usize,
    pub part: Part,
    /// Polynomial the complex equation was multiplied by to clear denominators.
    pub multiplier: Poly,
    pub terms: Vec<PdeTerm>,
}

#[derive(Clone, Debug)]
pub struct PdeSystem {
    pub unknowns: Vec<String>,
    pub coord_names: Vec<String>,
    pub integral_names: Vec<String>,
    /// Number of complex equations `L_i(dF(X)) = 0` before real/imaginary splitting.
    pub complex_count: usize,
    pub equations: Vec<PdeEquation>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Automorphism,
    Not { integral: usize, field: usize, part: Part, residual: Poly },
}

impl Verdict {
    pub fn is_automorphism(&self) -> bool {
        matches!(self, Verdict::Automorphism)
    }
}

/// Names of the first integrals, `Z1.., W1..`.
pub fn integral_names(def: &StructureDef) -> Vec<String> {
    (1..=def.nu()).map(|j| format!("Z{j}")).chain((1..=def.d()).map(|k| format!("W{k}"))).collect()
}

/// Product of the distinct denominators, and each coefficient multiplied by it.
fn clear_denominators(coeffs: &[RatFun], proto: &Poly) -> (Poly, Vec<Poly>) {
    let mut dens: Vec<Poly> = Vec::new();
    for c in coeffs {
        if c.is_zero() || c.den().is_constant() {
            continue;
        }
        if !dens.iter().any(|d| d == c.den()) {
            dens.push(c.den().clone());
        }
    }
    let mut m = Poly::one(proto.vars());
    for d in &dens {
        m = &m * d;
    }
    let cleared = coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                return Poly::zero(proto.vars());
            }
            let q = m.div_exact(c.den()).expect("denominator divides the product");
            c.num() * &q
        })
        .collect();
    (m, cleared)
}

pub fn generate_system(def: &StructureDef) -> PdeSystem {
    let n = def.n_coords();
    let names = def.vars().names().to_vec();
    let frame = def.frame();
    let integrals = def.first_integrals();
    let mut equations = Vec::new();
    for (fi, f) in integrals.iter().enumerate() {
        let grads: Vec<Poly> = (0..n).map(|q| f.derivative(q)).collect();
        for (li, l) in frame.iter().enumerate() {
            // coefficient list: for each q, c: L_c ∂_qF on ∂_c X_q; then L(∂_qF) on X_q.
            let mut slots: Vec<(usize, Option<usize>)> = Vec::new();
            let mut coeffs: Vec<RatFun> = Vec::new();
            for q in 0..n {
                if grads[q].is_zero() {
                    continue;
                }
                for c in 0..n {
                    let a = l.coeff(c);
                    if a.is_zero() {
                        continue;
                    }
                    slots.push((q, Some(c)));
                    coeffs.push(a.mul_poly(&grads[q]));
                }
                let b = l.apply_poly(&grads[q]);
                if !b.is_zero() {
                    slots.push((q, None));
                    coeffs.push(b);
                }
            }
            let (multiplier, cleared) = clear_denominators(&coeffs, f);
            for part in [Part::Re, Part::Im] {
                let terms = slots
                    .iter()
                    .zip(&cleared)
                    .filter_map(|(&(unknown, deriv), p)| {
                        let coeff = match part {
                            Part::Re => p.re(),
                            Part::Im => p.im(),
                        };
                        (!coeff.is_zero()).then_some(PdeTerm { unknown, deriv, coeff })
                    })
                    .collect();
                equations.push(PdeEquation { integral: fi, field: li, part, multiplier: multiplier.clone(), terms });
            }
        }
    }
    PdeSystem {
        unknowns: names.iter().map(|c| format!("X_{c}")).collect(),
        coord_names: names,
        integral_names: integral_names(def),
        complex_count: integrals.len() * frame.len(),
        equations,
    }
}

impl PdeEquation {
    /// Substitutes a candidate field; returns the (real) residual polynomial.
    pub fn residual(&self, x: &RealVectorFieldSym) -> Poly {
        let proto = &x.coeffs[0];
        let mut acc = Poly::zero(proto.vars());
        for t in &self.terms {
            let xq = &x.coeffs[t.unknown];
            let val = match t.deriv {
                Some(c) => xq.derivative(c),
                None => xq.clone(),
            };
            if !val.is_zero() {
                acc = &acc + &(&t.coeff * &val);
            }
        }
        acc
    }
}

pub fn check_against(system: &PdeSystem, x: &RealVectorFieldSym) -> Verdict {
    for eq in &system.equations {
        let r = eq.residual(x);
        if !r.is_zero() {
            return Verdict::Not { integral: eq.integral, field: eq.field, part: eq.part, residual: r };
        }
    }
    Verdict::Automorphism
}

pub fn check_candidate(def: &StructureDef, x: &RealVectorFieldSym) -> Result<Verdict, Error> {
    if x.coeffs.len() != def.n_coords() {
        return Err(Error::DimensionMismatch(format!(
            "candidate has {} components, expected {}",
            x.coeffs.len(),
            def.n_coords()
        )));
    }
    let x = RealVectorFieldSym {
        coeffs: x
            .coeffs
            .iter()
            .map(|p| p.remap(def.vars()))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidStructure("candidate uses unknown variables".into()))?,
    };
    Ok(check_against(&generate_system(def), &x))
}

/// Direct evaluation of `L_i(dF(X))` without the expanded system.
pub fn direct_residuals(def: &StructureDef, x: &RealVectorFieldSym) -> Vec<RatFun> {
    let n = def.n_coords();
    let mut out = Vec::new();
    for f in def.first_integrals() {
        let mut df_x = Poly::zero(def.vars());
        for q in 0..n {
            df_x = &df_x + &(&f.derivative(q) * &x.coeffs[q]);
        }
        for l in def.frame() {
            out.push(l.apply_poly(&df_x));
        }
    }
    out
}

impl fmt::Display for PdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            let part = match eq.part {
                Part::Re => "Re",
                Part::Im => "Im",
            };
            write!(f, "{} L{}(d{}(X)) * ({}): ", part, eq.field + 1, self.integral_names[eq.integral], eq.multiplier)?;
            if eq.terms.is_empty() {
                writeln!(f, "0 = 0")?;
                continue;
            }
            let parts: Vec<String> = eq
                .terms
                .iter()
                .map(|t| match t.deriv {
                    Some(c) => format!("({})*d{}/d{}", t.coeff, self.unknowns[t.unknown], self.coord_names[c]),
                    None => format!("({})*{}", t.coeff, self.unknowns[t.unknown]),
                })
                .collect();
            writeln!(f, "{} = 0", parts.join(" + "))?;
        }
        Ok(())
    }
}

/// The grouped presentation `u_F = dF(X)` for each first integral.
pub fn grouped_unknowns(def: &StructureDef) -> Vec<(String, String)> {
    let names = def.vars().names().to_vec();
    def.first_integrals()
        .iter()
        .zip(integral_names(def))
        .map(|(f, name)| {
            let parts: Vec<String> = (0..def.n_coords())
                .filter_map(|q| {
                    let g = f.derivative(q);
                    if g.is_zero() {
                        None
                    } else if g == Poly::one(def.vars()) {
                        Some(format!("X_{}", names[q]))
                    } else {
                        Some(format!("({})*X_{}", g, names[q]))
                    }
                })
                .collect();
            (format!("u_{}", name), parts.join(" + "))
        })
        .collect()
}

/// Convenience: a candidate from `(coordinate name, polynomial)` pairs; missing coordinates are zero.
pub fn candidate_from_pairs(def: &StructureDef, pairs: &[(String, Poly)]) -> Result<RealVectorFieldSym, Error> {
    let mut coeffs = vec![Poly::zero(def.vars()); def.n_coords()];
    for (name, p) in pairs {
        let idx = def
            .vars()
            .index_of(name)
            .ok_or_else(|| Error::InvalidStructure(format!("unknown coordinate {name}")))?;
        let q = p
            .remap(def.vars())
            .ok_or_else(|| Error::InvalidStructure(format!("coefficient of {name} uses unknown variables")))?;
        coeffs[idx] = &coeffs[idx] + &q;
    }
    RealVectorFieldSym::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussRat;
    use crate::structure::fixtures::*;

    fn var(def: &StructureDef, name: &str) -> Poly {
        Poly::var_named(def.vars(), name).unwrap()
    }

    #[test]
    fn complex_line_candidates() {
        let def = complex_line();
        let (x, y) = (var(&def, "x1"), var(&def, "y1"));
        let good = candidate_from_pairs(&def, &[("x1".into(), x.clone()), ("y1".into(), y)]).unwrap();
        assert!(check_candidate(&def, &good).unwrap().is_automorphism());
        let bad = candidate_from_pairs(&def, &[("x1".into(), x)]).unwrap();
        let Verdict::Not { residual, .. } = check_candidate(&def, &bad).unwrap() else { panic!() };
        assert_eq!(residual, Poly::constant(def.vars(), GaussRat::from_frac(1, 2)));
    }

    #[test]
    fn holomorphic_powers_pass() {
        let def = complex_line();
        let z = def.first_integral_z(0);
        for n in 0..5 {
            let zn = z.pow(n);
            let x = candidate_from_pairs(&def, &[("x1".into(), zn.re()), ("y1".into(), zn.im())]).unwrap();
            assert!(check_candidate(&def, &x).unwrap().is_automorphism(), "z^{n}");
        }
    }

    #[test]
    fn flat_system_is_dt_of_c() {
        let def = levi_flat(1, 1);
        let sys = generate_system(&def);
        assert_eq!(sys.complex_count, 1);
        let re = &sys.equations[0];
        assert_eq!(re.terms.len(), 1);
        assert_eq!(re.terms[0].unknown, def.s(0));
        assert_eq!(re.terms[0].deriv, Some(def.t(0)));
        assert!(sys.equations[1].terms.is_empty());
    }

    #[test]
    fn product_structure_line_field() {
        let def = heisenberg_times_line();
        let t = var(&def, "t1");
        let x = candidate_from_pairs(&def, &[("t1".into(), t.pow(2))]).unwrap();
        assert!(check_candidate(&def, &x).unwrap().is_automorphism());
        assert!(check_candidate(&def, &RealVectorFieldSym::zero(&def)).unwrap().is_automorphism());
    }

    #[test]
    fn s_dependent_multiplier_is_det_power() {
        let def = s_dependent();
        let sys = generate_system(&def);
        let det = &def.jacobians().det_w_s;
        for eq in &sys.equations {
            let mut m = eq.multiplier.clone();
            while !m.is_constant() {
                m = m.div_exact(det).expect("multiplier is a power of det W_s");
            }
        }
    }
}
