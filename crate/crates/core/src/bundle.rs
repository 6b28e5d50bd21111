//! Flat partial connections along the structure bundle.
//!
//! Matrices use the index layout `D[j][α][β] = D^α_β(L_j)`, so a section with components `η`
//! (a row vector) has `D_{L_j} η = L_j η + η D_j`.

use std::fmt;

use crate::algebra::matrix::{det, mat_mul, rat_inverse, rat_rank, rat_solve, transpose};
use crate::algebra::{RatFun, VarSet};
use crate::structure::field::structure_constants;
use crate::structure::{StructureDef, VectorFieldSym};
use crate::Error;

pub type RatMatrix = Vec<Vec<RatFun>>;

#[derive(Clone, Debug)]
pub struct VBundle {
    frame_labels: Vec<String>,
    base: Vec<VectorFieldSym>,
    d: Vec<RatMatrix>,
    c: Vec<Vec<Vec<RatFun>>>,
}

/// Components `η_1..η_r` of a section in the bundle frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionSym {
    pub components: Vec<RatFun>,
}

impl SectionSym {
    pub fn new(components: Vec<RatFun>) -> Self {
        SectionSym { components }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlatnessVerdict {
    Flat,
    NotFlat { j: usize, k: usize, alpha: usize, beta: usize, residual: RatFun },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionVerdict {
    Solution,
    Not { j: usize, alpha: usize, residual: RatFun },
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntegratingVerdict {
    Integrating,
    Not { j: usize, alpha: usize, beta: usize, residual: RatFun },
}

impl fmt::Display for FlatnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatnessVerdict::Flat => write!(f, "Flat"),
            FlatnessVerdict::NotFlat { j, k, alpha, beta, residual } => write!(
                f,
                "NotFlat at (j={}, k={}, alpha={}, beta={}) residual {}",
                j + 1,
                k + 1,
                alpha + 1,
                beta + 1,
                residual
            ),
        }
    }
}

impl fmt::Display for SolutionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionVerdict::Solution => write!(f, "Solution"),
            SolutionVerdict::Not { j, alpha, residual } => {
                write!(f, "Not at (j={}, alpha={}) residual {}", j + 1, alpha + 1, residual)
            }
        }
    }
}

impl fmt::Display for IntegratingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegratingVerdict::Integrating => write!(f, "Integrating"),
            IntegratingVerdict::Not { j, alpha, beta, residual } => write!(
                f,
                "Not at (j={}, alpha={}, beta={}) residual {}",
                j + 1,
                alpha + 1,
                beta + 1,
                residual
            ),
        }
    }
}

fn zero_matrix(vars: &VarSet, r: usize) -> RatMatrix {
    vec![vec![RatFun::zero(vars); r]; r]
}

fn mat_add(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

fn mat_neg(a: &RatMatrix) -> RatMatrix {
    a.iter().map(|row| row.iter().map(|x| -x).collect()).collect()
}

fn apply_to_matrix(l: &VectorFieldSym, m: &RatMatrix) -> RatMatrix {
    m.iter().map(|row| row.iter().map(|x| l.apply(x)).collect()).collect()
}

/// Kronecker product `a ⊗ b` with index `(α, a) ↦ α·rb + a`.
fn kron(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = Vec::with_capacity(ra * rb);
    for i in 0..ra {
        for p in 0..rb {
            let mut row = Vec::with_capacity(ra * rb);
            for j in 0..ra {
                for q in 0..rb {
                    row.push(&a[i][j] * &b[p][q]);
                }
            }
            out.push(row);
        }
    }
    out
}

fn identity(vars: &VarSet, r: usize) -> RatMatrix {
    (0..r).map(|i| (0..r).map(|j| if i == j { RatFun::one(vars) } else { RatFun::zero(vars) }).collect()).collect()
}

impl VBundle {
    /// Builds a bundle over `base`; structure constants are computed from the frame.
    pub fn new(base: Vec<VectorFieldSym>, frame_labels: Vec<String>, d: Vec<RatMatrix>) -> Result<Self, Error> {
        let r = frame_labels.len();
        if d.len() != base.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} connection matrices for {} frame fields",
                d.len(),
                base.len()
            )));
        }
        if d.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
            return Err(Error::DimensionMismatch(format!("connection matrices must be {}x{}", r, r)));
        }
        let c = structure_constants(&base)?;
        Ok(VBundle { frame_labels, base, d, c })
    }

    /// The zero connection of rank `r` over `base`.
    pub fn trivial(base: Vec<VectorFieldSym>, r: usize) -> Result<Self, Error> {
        let vars = base.first().map(|l| l.vars().clone()).unwrap_or_else(|| VarSet::new::<&str>(&[]));
        let d = vec![zero_matrix(&vars, r); base.len()];
        Self::new(base, (1..=r).map(|a| format!("e{}", a)).collect(), d)
    }

    pub fn rank(&self) -> usize {
        self.frame_labels.len()
    }

    pub fn frame_labels(&self) -> &[String] {
        &self.frame_labels
    }

    pub fn base(&self) -> &[VectorFieldSym] {
        &self.base
    }

    pub fn connection(&self) -> &[RatMatrix] {
        &self.d
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<RatFun>>] {
        &self.c
    }

    pub fn vars(&self) -> &VarSet {
        self.base[0].vars()
    }

    /// `D_{L_j} η = L_j η + η D_j`.
    pub fn covariant(&self, j: usize, eta: &[RatFun]) -> Vec<RatFun> {
        let r = self.rank();
        (0..r)
            .map(|b| {
                let mut acc = self.base[j].apply(&eta[b]);
                for a in 0..r {
                    if !eta[a].is_zero() && !self.d[j][a][b].is_zero() {
                        acc = &acc + &(&eta[a] * &self.d[j][a][b]);
                    }
                }
                acc
            })
            .collect()
    }

    fn same_base(&self, other: &VBundle) -> bool {
        self.base == other.base
    }
}

/// Checks `L_j D_k − L_k D_j + D_k D_j − D_j D_k = Σ_l C^l_{jk} D_l` for all `j < k`.
pub fn flatness_check(b: &VBundle) -> FlatnessVerdict {
    let n = b.base.len();
    let r = b.rank();
    for j in 0..n {
        for k in (j + 1)..n {
            let ljdk = apply_to_matrix(&b.base[j], &b.d[k]);
            let lkdj = apply_to_matrix(&b.base[k], &b.d[j]);
            let dkdj = mat_mul(&b.d[k], &b.d[j]);
            let djdk = mat_mul(&b.d[j], &b.d[k]);
            for alpha in 0..r {
                for beta in 0..r {
                    let mut res = &(&ljdk[alpha][beta] - &lkdj[alpha][beta]) + &(&dkdj[alpha][beta] - &djdk[alpha][beta]);
                    for l in 0..n {
                        let c = &b.c[j][k][l];
                        if !c.is_zero() {
                            res = &res - &(c * &b.d[l][alpha][beta]);
                        }
                    }
                    if !res.is_zero() {
                        return FlatnessVerdict::NotFlat { j, k, alpha, beta, residual: res };
                    }
                }
            }
        }
    }
    FlatnessVerdict::Flat
}

fn check_invertible(t: &RatMatrix) -> Result<RatMatrix, Error> {
    let dt = det(t);
    if dt.is_zero() {
        return Err(Error::NotInvertible);
    }
    match dt.value_at_origin() {
        Some(v) if !v.is_zero() => {}
        _ => return Err(Error::NotInvertible),
    }
    rat_inverse(t).ok_or(Error::NotInvertible)
}

/// Connection matrices in the frame `ω̃ = T ω`: `D̃ = (L T + T D) T⁻¹`.
pub fn frame_change(b: &VBundle, t: &RatMatrix) -> Result<VBundle, Error> {
    let r = b.rank();
    if t.len() != r || t.iter().any(|row| row.len() != r) {
        return Err(Error::DimensionMismatch(format!("frame change must be {}x{}", r, r)));
    }
    let tinv = check_invertible(t)?;
    let d = b
        .base
        .iter()
        .zip(&b.d)
        .map(|(l, dj)| mat_mul(&mat_add(&apply_to_matrix(l, t), &mat_mul(t, dj)), &tinv))
        .collect();
    Ok(VBundle { frame_labels: b.frame_labels.iter().map(|s| format!("{}~", s)).collect(), base: b.base.clone(), d, c: b.c.clone() })
}

/// Section components in the frame `ω̃ = T ω`: `η̃ = η T⁻¹`.
pub fn transform_section(eta: &SectionSym, t: &RatMatrix) -> Result<SectionSym, Error> {
    let tinv = check_invertible(t)?;
    let row = mat_mul(std::slice::from_ref(&eta.components), &tinv);
    Ok(SectionSym::new(row.into_iter().next().unwrap_or_default()))
}

pub fn dual_bundle(b: &VBundle) -> VBundle {
    VBundle {
        frame_labels: b.frame_labels.iter().map(|s| format!("{}*", s)).collect(),
        base: b.base.clone(),
        d: b.d.iter().map(|m| mat_neg(&transpose(m))).collect(),
        c: b.c.clone(),
    }
}

/// Kronecker sum `D ⊗ I + I ⊗ D′`; frame `ω^α ⊗ η^a` is ordered with `a` fastest.
pub fn tensor_bundle(b: &VBundle, b2: &VBundle) -> Result<VBundle, Error> {
    if !b.same_base(b2) {
        return Err(Error::BaseFrameMismatch);
    }
    let vars = b.vars().clone();
    let (i1, i2) = (identity(&vars, b.rank()), identity(&vars, b2.rank()));
    let d = b.d.iter().zip(&b2.d).map(|(m1, m2)| mat_add(&kron(m1, &i2), &kron(&i1, m2))).collect();
    let mut labels = Vec::new();
    for x in &b.frame_labels {
        for y in &b2.frame_labels {
            labels.push(format!("{}(x){}", x, y));
        }
    }
    Ok(VBundle { frame_labels: labels, base: b.base.clone(), d, c: b.c.clone() })
}

pub fn hom_bundle(b: &VBundle, b2: &VBundle) -> Result<VBundle, Error> {
    tensor_bundle(&dual_bundle(b), b2)
}

/// Checks `L_j η_α + Σ_β η_β D^β_α(L_j) = 0`.
pub fn is_solution_section(b: &VBundle, eta: &SectionSym) -> SolutionVerdict {
    for j in 0..b.base.len() {
        for (alpha, residual) in b.covariant(j, &eta.components).into_iter().enumerate() {
            if !residual.is_zero() {
                return SolutionVerdict::Not { j, alpha, residual };
            }
        }
    }
    SolutionVerdict::Solution
}

/// Checks `L_j Λ = −Λ D_j`; every row of an integrating frame is a solution.
pub fn is_integrating_frame(b: &VBundle, lambda: &RatMatrix) -> Result<IntegratingVerdict, Error> {
    let dl = det(lambda);
    match (dl.value_at_origin(), lambda.len() == b.rank()) {
        (Some(v), true) if !v.is_zero() => {}
        _ => return Err(Error::NotInvertibleAtBase),
    }
    for (j, (l, dj)) in b.base.iter().zip(&b.d).enumerate() {
        let lhs = apply_to_matrix(l, lambda);
        let rhs = mat_mul(lambda, dj);
        for (alpha, (x, y)) in lhs.iter().zip(&rhs).enumerate() {
            for (beta, (p, q)) in x.iter().zip(y).enumerate() {
                let res = p + q;
                if !res.is_zero() {
                    return Ok(IntegratingVerdict::Not { j, alpha, beta, residual: res });
                }
            }
        }
    }
    Ok(IntegratingVerdict::Integrating)
}

/// T′ over the given base frame in the coframe `dZ_1..dZ_ν, dW_1..dW_d`, with
/// `D_L ω^β = ℒ_L ω^β` re-expanded in that coframe.
pub fn tprime_bundle_over(def: &StructureDef, base: Vec<VectorFieldSym>) -> Result<VBundle, Error> {
    let vars = def.vars().clone();
    let integrals = def.first_integrals();
    let ncoord = def.n_coords();
    let forms: Vec<Vec<RatFun>> = integrals
        .iter()
        .map(|f| (0..ncoord).map(|c| RatFun::from_poly(f.derivative(c))).collect())
        .collect();
    let a: Vec<Vec<RatFun>> = (0..ncoord).map(|c| forms.iter().map(|w| w[c].clone()).collect()).collect();
    let mut d = Vec::with_capacity(base.len());
    for l in &base {
        let mut m = zero_matrix(&vars, forms.len());
        for (beta, w) in forms.iter().enumerate() {
            let lie: Vec<RatFun> = (0..ncoord)
                .map(|c| {
                    let mut acc = l.apply(&w[c]);
                    for (e, we) in w.iter().enumerate() {
                        if !we.is_zero() {
                            acc = &acc + &(we * &l.coeff(e).derivative(c));
                        }
                    }
                    acc
                })
                .collect();
            let coeffs = rat_solve(&a, &lie)
                .ok_or_else(|| Error::InvalidStructure("Lie derivative leaves the span of dZ, dW".into()))?;
            m[beta] = coeffs;
        }
        d.push(m);
    }
    let mut labels: Vec<String> = (1..=def.nu()).map(|j| format!("dZ{}", j)).collect();
    labels.extend((1..=def.d()).map(|k| format!("dW{}", k)));
    VBundle::new(base, labels, d)
}

/// T′ over the structure's own frame.
pub fn canonical_tprime_bundle(def: &StructureDef) -> Result<VBundle, Error> {
    tprime_bundle_over(def, def.frame().to_vec())
}

/// Generators of the structure induced on the total space, with closure verification.
#[derive(Clone, Debug)]
pub struct VeGenerators {
    pub vars: VarSet,
    pub generators: Vec<VectorFieldSym>,
    pub labels: Vec<String>,
    pub closed: bool,
    pub rank: usize,
}

/// `G_j = L_j − Σ_α (Σ_β w_β D^β_α(L_j)) ∂/∂w_α` together with `∂/∂wb_α`.
pub fn ve_generators(b: &VBundle) -> Result<VeGenerators, Error> {
    let r = b.rank();
    let mut extra: Vec<String> = (1..=r).map(|a| format!("w{}", a)).collect();
    extra.extend((1..=r).map(|a| format!("wb{}", a)));
    let base_vars = b.vars().clone();
    let vars = base_vars.extended(&extra);
    let nbase = base_vars.len();
    let embed_err = || Error::InvalidStructure("fiber coordinate names clash with base coordinates".into());
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for (j, (l, dj)) in b.base.iter().zip(&b.d).enumerate() {
        let mut g = l.embed(&vars).ok_or_else(embed_err)?;
        for alpha in 0..r {
            let mut c = RatFun::zero(&vars);
            for (beta, row) in dj.iter().enumerate() {
                if row[alpha].is_zero() {
                    continue;
                }
                let w = RatFun::from_poly(crate::algebra::Poly::var(&vars, nbase + beta));
                c = &c + &(&w * &row[alpha].remap(&vars).ok_or_else(embed_err)?);
            }
            g.set_coeff(nbase + alpha, -&c);
        }
        gens.push(g);
        labels.push(format!("G{}", j + 1));
    }
    for alpha in 0..r {
        gens.push(VectorFieldSym::coordinate(&vars, nbase + r + alpha));
        labels.push(format!("d/dwb{}", alpha + 1));
    }
    let rank = rat_rank(&gens.iter().map(|g| g.coeffs().to_vec()).collect::<Vec<_>>());
    let closed = structure_constants(&gens).is_ok();
    Ok(VeGenerators { vars, generators: gens, labels, closed, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GaussRat, Poly};
    use crate::structure::fixtures::*;
    use crate::structure::theta_of_b;

    fn rf(p: Poly) -> RatFun {
        RatFun::from_poly(p)
    }

    #[test]
    fn trivial_bundle_flat_and_constants_solve() {
        let def = heisenberg_times_line();
        let b = VBundle::trivial(def.frame().to_vec(), 2).unwrap();
        assert_eq!(flatness_check(&b), FlatnessVerdict::Flat);
        let v = def.vars();
        let eta = SectionSym::new(vec![RatFun::constant(v, GaussRat::from_int(3)), RatFun::one(v)]);
        assert_eq!(is_solution_section(&b, &eta), SolutionVerdict::Solution);
        assert_eq!(is_integrating_frame(&b, &identity(v, 2)).unwrap(), IntegratingVerdict::Integrating);
    }

    #[test]
    fn canonical_tprime_has_zero_connection() {
        for def in [three_w(), heisenberg_times_line(), s_dependent(), modulus_weighted(1, 2)] {
            let b = canonical_tprime_bundle(&def).unwrap();
            assert!(b.connection().iter().all(|m| m.iter().flatten().all(|x| x.is_zero())));
            assert_eq!(flatness_check(&b), FlatnessVerdict::Flat);
        }
    }

    #[test]
    fn theta_section_of_power_curve_is_not_solution() {
        let (k, l) = (2u32, 3u32);
        let def = power_curve(k, l);
        let v = def.vars();
        let t = Poly::var(v, def.t(0));
        let b = vec![t.pow(k), -&t.pow(l)];
        let th = theta_of_b(&def, &b);
        let eta = SectionSym::new(th.cz.into_iter().chain(th.cw).collect());
        let bundle = canonical_tprime_bundle(&def).unwrap();
        let SolutionVerdict::Not { alpha, residual, .. } = is_solution_section(&bundle, &eta) else { panic!() };
        assert_eq!(alpha, 0);
        assert_eq!(residual, rf(t.pow(k - 1).scale(&GaussRat::from_int(k as i64))));
    }

    #[test]
    fn diagonal_frame_change() {
        let def = complex_line();
        let v = def.vars();
        let x = rf(Poly::var(v, 0));
        let f = &RatFun::one(v) + &x;
        let b = VBundle::trivial(def.frame().to_vec(), 2).unwrap();
        let t = vec![vec![f.clone(), RatFun::zero(v)], vec![RatFun::zero(v), RatFun::one(v)]];
        let b2 = frame_change(&b, &t).unwrap();
        let lf = def.frame()[0].apply(&f);
        assert_eq!(b2.connection()[0][0][0], lf.checked_div(&f).unwrap());
        assert!(b2.connection()[0][1][1].is_zero());
        let tinv = rat_inverse(&t).unwrap();
        assert_eq!(is_integrating_frame(&b2, &tinv).unwrap(), IntegratingVerdict::Integrating);
        let back = frame_change(&b2, &tinv).unwrap();
        assert_eq!(back.connection(), b.connection());
        let lam = vec![vec![x.clone(), RatFun::zero(v)], vec![RatFun::zero(v), RatFun::one(v)]];
        assert!(matches!(is_integrating_frame(&b, &lam), Err(Error::NotInvertibleAtBase)));
        let lam = vec![vec![f.clone(), RatFun::zero(v)], vec![RatFun::zero(v), RatFun::one(v)]];
        assert!(matches!(is_integrating_frame(&b, &lam).unwrap(), IntegratingVerdict::Not { .. }));
        let sing = vec![vec![x.clone(), x.clone()], vec![x.clone(), x]];
        assert!(matches!(frame_change(&b, &sing), Err(Error::NotInvertible)));
    }

    #[test]
    fn dual_and_mismatch() {
        let def = heisenberg_times_line();
        let b = VBundle::trivial(def.frame().to_vec(), 1).unwrap();
        let d = dual_bundle(&b);
        assert!(d.connection()[0][0][0].is_zero());
        let other = VBundle::trivial(complex_line().frame().to_vec(), 1).unwrap();
        assert!(matches!(tensor_bundle(&b, &other), Err(Error::BaseFrameMismatch)));
    }

    #[test]
    fn ve_trivial_rank_one() {
        let def = complex_line();
        let b = VBundle::trivial(def.frame().to_vec(), 1).unwrap();
        let ve = ve_generators(&b).unwrap();
        assert_eq!(ve.generators.len(), 2);
        assert!(ve.closed);
        assert_eq!(ve.rank, def.rank() + 1);
        assert_eq!(ve.generators[1], VectorFieldSym::coordinate(&ve.vars, 3));
    }
}
