//! Built-in structures used by tests, the acceptance suite and the CLI.

use crate::algebra::{GaussRat, Poly};

use super::{canonical_vars, StructureDef};

fn t_power(def_vars: &crate::algebra::VarSet, t_index: usize, e: u32, c: GaussRat) -> Poly {
    let mut exps = vec![0; def_vars.len()];
    exps[t_index] = e;
    Poly::monomial(def_vars, exps, c)
}

/// Mizohata structure `W = s + (i/2) Σ ε_j t_j²` with signs `eps`.
pub fn mizohata(eps: &[i64]) -> StructureDef {
    let n = eps.len();
    let v = canonical_vars(0, 1, n);
    let mut phi = Poly::zero(&v);
    for (j, &e) in eps.iter().enumerate() {
        phi = &phi + &t_power(&v, 1 + j, 2, GaussRat::from_frac(e, 2));
    }
    StructureDef::new(0, 1, n, vec![phi]).expect("valid Mizohata structure")
}

/// Mizohata structure of type `{pos, n − pos}`: the first `pos` signs are +1, the rest −1.
pub fn mizohata_type(pos: usize, n: usize) -> StructureDef {
    let eps: Vec<i64> = (0..n).map(|j| if j < pos { 1 } else { -1 }).collect();
    mizohata(&eps)
}

/// `W_1 = s_1 + i t^{ℓ+1}/(ℓ+1)`, `W_2 = s_2 + i t^{k+1}/(k+1)` in ℝ³.
pub fn power_curve(k: u32, l: u32) -> StructureDef {
    let v = canonical_vars(0, 2, 1);
    let phi1 = t_power(&v, 2, l + 1, GaussRat::from_frac(1, l as i64 + 1));
    let phi2 = t_power(&v, 2, k + 1, GaussRat::from_frac(1, k as i64 + 1));
    StructureDef::new(0, 2, 1, vec![phi1, phi2]).expect("valid power-curve structure")
}

/// `W_k = s_k + i t^{α^k}` on ℝ^d × ℝ^μ.
pub fn monomial_family(alphas: &[Vec<u32>]) -> StructureDef {
    let d = alphas.len();
    let mu = alphas.first().map(|a| a.len()).unwrap_or(0);
    let v = canonical_vars(0, d, mu);
    let phi = alphas
        .iter()
        .map(|a| {
            let mut e = vec![0; d];
            e.extend_from_slice(a);
            Poly::monomial(&v, e, GaussRat::one())
        })
        .collect();
    StructureDef::new(0, d, mu, phi).expect("valid monomial structure")
}

/// `W = (s_1 + i t_1², s_2 + i t_1 t_2, s_3 + i t_2²)`.
pub fn three_w() -> StructureDef {
    monomial_family(&[vec![2, 0], vec![1, 1], vec![0, 2]])
}

/// `Z = x + iy`, `W_1 = s_1 + i t^{k+1}/(k+1)|Z|²`, `W_2 = s_2 + i t^{ℓ+1}/(ℓ+1)|Z|²`.
pub fn modulus_weighted(k: u32, l: u32) -> StructureDef {
    let v = canonical_vars(1, 2, 1);
    let x = Poly::var(&v, 0);
    let y = Poly::var(&v, 1);
    let r2 = &x.pow(2) + &y.pow(2);
    let phi1 = &t_power(&v, 4, k + 1, GaussRat::from_frac(1, k as i64 + 1)) * &r2;
    let phi2 = &t_power(&v, 4, l + 1, GaussRat::from_frac(1, l as i64 + 1)) * &r2;
    StructureDef::new(1, 2, 1, vec![phi1, phi2]).expect("valid structure")
}

/// The complex structure on ℂ = ℝ²: `L = ∂/∂z̄`.
pub fn complex_line() -> StructureDef {
    StructureDef::new(1, 0, 0, Vec::new()).expect("valid complex structure")
}

/// Levi-flat structure `W_k = s_k` with μ real directions.
pub fn levi_flat(d: usize, mu: usize) -> StructureDef {
    let v = canonical_vars(0, d, mu);
    StructureDef::new(0, d, mu, vec![Poly::zero(&v); d]).expect("valid flat structure")
}

/// Product of the Heisenberg-type structure `w = s + i|z|²` with a real line `t`.
pub fn heisenberg_times_line() -> StructureDef {
    let v = canonical_vars(1, 1, 1);
    let x = Poly::var(&v, 0);
    let y = Poly::var(&v, 1);
    StructureDef::new(1, 1, 1, vec![&x.pow(2) + &y.pow(2)]).expect("valid product structure")
}

/// A structure whose φ depends on s: `W = s + i s t²`, so `W_s = 1 + i t²`.
pub fn s_dependent() -> StructureDef {
    let v = canonical_vars(0, 1, 1);
    let s = Poly::var(&v, 0);
    let t = Poly::var(&v, 1);
    StructureDef::new(0, 1, 1, vec![&s * &t.pow(2)]).expect("valid structure")
}
