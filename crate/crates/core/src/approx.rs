//! s-approximate solutions of `D₁ = ∂_s + iD` with `D = L + A`, `L = ∂_t + i Σ b_j ∂_{x_j}`.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{GaussRat, NumPoly, Poly, VarSet};
use crate::Error;

pub const DEFAULT_TRUNCATION: usize = 8;
pub const DEFAULT_GRID: usize = 33;
pub const SAFETY_FACTOR: f64 = 2.0;
/// Sample points per unit interval used for the χ-derivative suprema.
const CHI_SAMPLES: usize = 2000;
/// Upper bound on the number of box grid points; the per-axis resolution is reduced to fit.
const MAX_GRID_POINTS: usize = 200_000;

/// `L = ∂_t + i Σ b_j(x,t) ∂_{x_j}` over coordinates `x1..xN, t1`, with optional zeroth-order matrix `A`.
#[derive(Clone, Debug)]
pub struct NormalFormField {
    vars: VarSet,
    b: Vec<Poly>,
    a: Option<Vec<Vec<Poly>>>,
}

pub fn normal_form_vars(n: usize) -> VarSet {
    let mut names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    names.push("t1".into());
    VarSet::new(&names)
}

impl NormalFormField {
    pub fn new(b: Vec<Poly>, a: Option<Vec<Vec<Poly>>>) -> Result<Self, Error> {
        let vars = normal_form_vars(b.len());
        let unknown = || Error::InvalidStructure("normal-form coefficients must use x1..xN, t1 only".into());
        let b: Vec<Poly> = b.iter().map(|p| p.remap(&vars).ok_or_else(unknown)).collect::<Result<_, _>>()?;
        if let Some(j) = b.iter().position(|p| !p.is_real()) {
            return Err(Error::InvalidStructure(format!("b{} is not real", j + 1)));
        }
        let a = match a {
            None => None,
            Some(m) => {
                let r = m.len();
                if m.iter().any(|row| row.len() != r) {
                    return Err(Error::DimensionMismatch("A must be square".into()));
                }
                Some(
                    m.iter()
                        .map(|row| row.iter().map(|p| p.remap(&vars).ok_or_else(unknown)).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        Ok(NormalFormField { vars, b, a })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn b(&self) -> &[Poly] {
        &self.b
    }

    pub fn a(&self) -> Option<&[Vec<Poly>]> {
        self.a.as_deref()
    }

    pub fn t_index(&self) -> usize {
        self.b.len()
    }

    pub fn l_apply(&self, p: &Poly) -> Poly {
        let mut out = p.derivative(self.t_index());
        for (j, bj) in self.b.iter().enumerate() {
            if !bj.is_zero() {
                out = &out + &(bj * &p.derivative(j)).mul_i();
            }
        }
        out
    }

    pub fn d_apply(&self, v: &[Poly]) -> Vec<Poly> {
        let mut out: Vec<Poly> = v.iter().map(|p| self.l_apply(p)).collect();
        if let Some(a) = &self.a {
            for (row, o) in a.iter().zip(out.iter_mut()) {
                for (aab, vb) in row.iter().zip(v) {
                    if !aab.is_zero() && !vb.is_zero() {
                        *o = &*o + &(aab * vb);
                    }
                }
            }
        }
        out
    }

    /// `(−iD)v / divisor`.
    fn step(&self, v: &[Poly], divisor: i64) -> Vec<Poly> {
        let f = GaussRat::complex(0, -1) * GaussRat::from_frac(1, divisor);
        self.d_apply(v).iter().map(|p| p.scale(&f)).collect()
    }
}

/// Coefficients `c_k = (−iD)^k u₀ / k!` for `k = 0..=n`, plus `c_{n+1}`.
#[derive(Clone, Debug)]
pub struct ApproxJet {
    pub u0: Vec<Poly>,
    pub coeffs: Vec<Vec<Poly>>,
    pub next: Vec<Poly>,
}

impl ApproxJet {
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `(k+1) c_{k+1} = (−iD) c_k` for every stored `k`.
    pub fn recursion_holds(&self, f: &NormalFormField) -> bool {
        let all: Vec<&Vec<Poly>> = self.coeffs.iter().chain(std::iter::once(&self.next)).collect();
        all.windows(2).enumerate().all(|(k, w)| {
            let lhs: Vec<Poly> = w[1].iter().map(|p| p.scale(&GaussRat::from_int(k as i64 + 1))).collect();
            lhs == f.step(w[0], 1)
        })
    }

    /// `D₁(Σ_{k≤n} c_k s^k)` as polynomials in `(x, t, s)`.
    pub fn formal_residual(&self, f: &NormalFormField) -> Vec<Poly> {
        let vars = f.vars().extended(&["s"]);
        let s_idx = vars.len() - 1;
        let s = Poly::var(&vars, s_idx);
        let lift = |p: &Poly| p.remap(&vars).expect("field variables embed");
        let ext = NormalFormField { vars: vars.clone(), b: f.b.iter().map(lift).collect(), a: f.a.as_ref().map(|m| m.iter().map(|r| r.iter().map(lift).collect()).collect()) };
        let r = self.u0.len();
        let mut u = vec![Poly::zero(&vars); r];
        for (k, ck) in self.coeffs.iter().enumerate() {
            let sk = s.pow(k as u32);
            for (ui, ci) in u.iter_mut().zip(ck) {
                *ui = &*ui + &(&lift(ci) * &sk);
            }
        }
        let du = ext.d_apply(&u);
        u.iter().zip(du).map(|(ui, d)| &ui.derivative(s_idx) + &d.mul_i()).collect()
    }

    /// The formal identity `D₁ û = O(s^n)`: every residual coefficient of s-degree below n vanishes.
    pub fn formal_identity_holds(&self, f: &NormalFormField) -> bool {
        let n = self.n() as u32;
        self.formal_residual(f)
            .iter()
            .all(|p| p.terms().iter().all(|(e, _)| *e.last().expect("s variable") >= n))
    }
}

pub fn symbolic_powers(f: &NormalFormField, u0: &[Poly], n: usize) -> Result<ApproxJet, Error> {
    if let Some(a) = f.a() {
        if a.len() != u0.len() {
            return Err(Error::DimensionMismatch(format!("u0 has {} components, A is {}x{}", u0.len(), a.len(), a.len())));
        }
    }
    let u0: Vec<Poly> = u0
        .iter()
        .map(|p| p.remap(f.vars()).ok_or_else(|| Error::InvalidStructure("u0 must use x1..xN, t1 only".into())))
        .collect::<Result<_, _>>()?;
    let mut coeffs = vec![u0.clone()];
    for k in 0..n {
        let c = f.step(&coeffs[k], k as i64 + 1);
        coeffs.push(c);
    }
    let next = f.step(&coeffs[n], n as i64 + 1);
    Ok(ApproxJet { u0, coeffs, next })
}

/// `∂_s^l ψ_j |_{s=0}` for `l = 0..=l_max`, where `x_j + s ψ_j` is the jet of `u₀ = x_j` under `L`.
pub fn psi_jets(f: &NormalFormField, j: usize, l_max: usize) -> Vec<Poly> {
    let bare = NormalFormField { vars: f.vars.clone(), b: f.b.clone(), a: None };
    let xj = Poly::var(f.vars(), j);
    let jet = symbolic_powers(&bare, &[xj], l_max + 1).expect("scalar jet");
    let mut fact = GaussRat::one();
    (0..=l_max)
        .map(|l| {
            if l > 0 {
                fact = &fact * &GaussRat::from_int(l as i64);
            }
            jet.coeffs[l + 1][0].scale(&fact)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsiVerdict {
    Holds,
    Fails { l: usize, lhs: Poly, rhs: Poly },
}

/// Checks `∂_s^l ψ_j|_{s=0} = (−iL)^l b_j / (l+1)` for `l = 0..=l_max`.
pub fn psi_relation_check(f: &NormalFormField, j: usize, l_max: usize) -> PsiVerdict {
    let lhs = psi_jets(f, j, l_max);
    let mut iter = f.b[j].clone();
    for (l, left) in lhs.into_iter().enumerate() {
        if l > 0 {
            iter = f.l_apply(&iter).scale(&GaussRat::complex(0, -1));
        }
        let rhs = iter.scale(&GaussRat::from_frac(1, l as i64 + 1));
        if left != rhs {
            return PsiVerdict::Fails { l, lhs: left, rhs };
        }
    }
    PsiVerdict::Holds
}

/// Truncated Taylor series `Σ a_i h^i` in floating point.
#[derive(Clone, Debug)]
struct Taylor(Vec<f64>);

impl Taylor {
    fn constant(c: f64, q: usize) -> Self {
        let mut v = vec![0.0; q + 1];
        v[0] = c;
        Taylor(v)
    }

    /// `α + β·h`.
    fn affine(alpha: f64, beta: f64, q: usize) -> Self {
        let mut v = Taylor::constant(alpha, q);
        if q > 0 {
            v.0[1] = beta;
        }
        v
    }

    fn add(&self, o: &Taylor) -> Taylor {
        Taylor(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn mul(&self, o: &Taylor) -> Taylor {
        let q = self.0.len();
        Taylor((0..q).map(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()).collect())
    }

    fn recip(&self) -> Taylor {
        let q = self.0.len();
        let mut r = vec![0.0; q];
        r[0] = 1.0 / self.0[0];
        for k in 1..q {
            let s: f64 = (1..=k).map(|j| self.0[j] * r[k - j]).sum();
            r[k] = -s * r[0];
        }
        Taylor(r)
    }

    fn exp(&self) -> Taylor {
        let q = self.0.len();
        let mut e = vec![0.0; q];
        e[0] = self.0[0].exp();
        for k in 1..q {
            let s: f64 = (1..=k).map(|j| j as f64 * self.0[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Taylor(e)
    }

    fn scale(&self, c: f64) -> Taylor {
        Taylor(self.0.iter().map(|a| a * c).collect())
    }
}

/// `f(v) = exp(−1/v)` for `v > 0`, else 0, as a Taylor series.
fn bump_taylor(v: &Taylor) -> Taylor {
    let q = v.0.len() - 1;
    if v.0[0] < 1e-3 {
        return Taylor::constant(0.0, q);
    }
    v.recip().scale(-1.0).exp()
}

/// The fixed cutoff: `χ(u) = f(2−2|u|) / (f(2−2|u|) + f(2|u|−1))`.
pub fn chi(u: f64) -> f64 {
    chi_derivatives(u, 0)[0]
}

/// `χ(u), χ′(u), …, χ^{(q)}(u)`.
pub fn chi_derivatives(u: f64, q: usize) -> Vec<f64> {
    let au = u.abs();
    if au <= 0.5 {
        let mut v = vec![0.0; q + 1];
        v[0] = 1.0;
        return v;
    }
    if au >= 1.0 {
        return vec![0.0; q + 1];
    }
    let sign = if u < 0.0 { -1.0 } else { 1.0 };
    let fa = bump_taylor(&Taylor::affine(2.0 - 2.0 * au, -2.0 * sign, q));
    let fb = bump_taylor(&Taylor::affine(2.0 * au - 1.0, 2.0 * sign, q));
    let c = fa.mul(&fa.add(&fb).recip());
    let mut fact = 1.0;
    c.0.iter()
        .enumerate()
        .map(|(i, a)| {
            if i > 0 {
                fact *= i as f64;
            }
            a * fact
        })
        .collect()
}

/// `X_q = sup_u |u^q χ^{(q)}(u)|` for `q = 0..=q_max`.
fn chi_moment_sups(q_max: usize) -> Vec<f64> {
    let mut sups = vec![0.0f64; q_max + 1];
    for i in 0..=CHI_SAMPLES {
        let u = 0.5 + 0.5 * i as f64 / CHI_SAMPLES as f64;
        let d = chi_derivatives(u, q_max);
        for q in 0..=q_max {
            sups[q] = sups[q].max((u.powi(q as i32) * d[q]).abs());
        }
    }
    sups[0] = sups[0].max(1.0);
    sups
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// All multi-indices of length `dim` with total degree at most `max`.
fn multi_indices(dim: usize, max: usize) -> Vec<Vec<usize>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=max {
        for mut rest in multi_indices(dim - 1, max - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Centered axis-aligned box `|x_j| ≤ h_j`, `|t| ≤ h_t` sampled on a uniform grid.
#[derive(Clone, Debug)]
pub struct SampleBox {
    pub half_widths: Vec<f64>,
    pub per_axis: usize,
}

impl SampleBox {
    pub fn unit(dim: usize, per_axis: usize) -> Self {
        SampleBox { half_widths: vec![1.0; dim], per_axis }
    }

    /// Per-axis resolution after capping the total point count.
    pub fn effective_per_axis(&self) -> usize {
        let dim = self.half_widths.len() as u32;
        let mut g = self.per_axis.max(2);
        while g > 2 && g.saturating_pow(dim) > MAX_GRID_POINTS {
            g -= 1;
        }
        g
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let g = self.effective_per_axis();
        let dim = self.half_widths.len();
        let total = g.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                (0..dim)
                    .map(|a| {
                        let i = idx % g;
                        idx /= g;
                        let h = self.half_widths[a];
                        -h + 2.0 * h * i as f64 / (g - 1) as f64
                    })
                    .collect()
            })
            .collect()
    }
}

/// Cutoff radii `R_0 ≤ R_1 ≤ …`, each a power of two.
#[derive(Clone, Debug)]
pub struct CutoffPlan {
    pub sample_box: SampleBox,
    pub constants: Vec<f64>,
    pub r_log2: Vec<i32>,
}

impl CutoffPlan {
    pub fn r(&self, k: usize) -> f64 {
        2f64.powi(self.r_log2[k])
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.r_log2.len()).map(|k| self.r(k)).collect()
    }
}

fn sup_abs(p: &Poly, pts: &[Vec<f64>]) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let np = NumPoly::new(p);
    pts.par_iter().map(|x| np.eval(x).norm()).reduce(|| 0.0, f64::max)
}

/// Samples `C(α,l,m,k)` on the box and picks the smallest admissible powers of two.
pub fn plan_cutoffs(jet: &ApproxJet, sample_box: SampleBox) -> Result<CutoffPlan, Error> {
    let n = jet.n();
    let vars = jet.u0[0].vars().clone();
    if sample_box.half_widths.len() != vars.len() {
        return Err(Error::DimensionMismatch(format!("box has {} axes, field has {}", sample_box.half_widths.len(), vars.len())));
    }
    let pts = sample_box.points();
    let xq = chi_moment_sups(n);
    let mut constants = Vec::with_capacity(n + 1);
    let mut r_log2 = Vec::with_capacity(n + 1);
    let mut prev = 0i32;
    for (k, ck) in jet.coeffs.iter().enumerate() {
        let kf = factorial(k);
        let mut best = 0.0f64;
        for idx in multi_indices(vars.len(), k) {
            let order: usize = idx.iter().sum();
            let mut s = 0.0f64;
            for comp in ck {
                let mut d = comp.clone();
                for (v, &e) in idx.iter().enumerate() {
                    for _ in 0..e {
                        d = d.derivative(v);
                    }
                }
                s = s.max(sup_abs(&d, &pts) * kf);
            }
            for m in 0..=(k - order) {
                let q: f64 = (0..=m).map(|q| binom(m, q) * xq[q] / factorial(k - m + q)).sum();
                best = best.max(SAFETY_FACTOR * q * s);
            }
        }
        if !best.is_finite() {
            return Err(Error::PlanInfeasible(format!("sampled constant for k = {k} is not finite")));
        }
        let need = if best > 0.0 { (best * 2f64.powi(k as i32)).log2().ceil() as i32 } else { 0 };
        prev = prev.max(need).max(0);
        constants.push(best);
        r_log2.push(prev);
    }
    Ok(CutoffPlan { sample_box, constants, r_log2 })
}

/// Numeric sampler for `u = Σ c_k χ(R_k s) s^k` and its residual `D₁u`.
#[derive(Clone, Debug)]
pub struct ApproxSolution {
    coeffs: Vec<Vec<NumPoly>>,
    next: Vec<NumPoly>,
    plan: CutoffPlan,
}

pub fn assemble_numeric(jet: &ApproxJet, plan: &CutoffPlan) -> Result<ApproxSolution, Error> {
    if plan.r_log2.len() != jet.coeffs.len() {
        return Err(Error::PlanInfeasible("plan length differs from the jet order".into()));
    }
    if plan.constants.iter().any(|c| !c.is_finite()) {
        return Err(Error::PlanInfeasible("non-finite constant in plan".into()));
    }
    Ok(ApproxSolution {
        coeffs: jet.coeffs.iter().map(|c| c.iter().map(NumPoly::new).collect()).collect(),
        next: jet.next.iter().map(NumPoly::new).collect(),
        plan: plan.clone(),
    })
}

/// Sampled bounds backing the s-approximate property.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// Sampled `sup |c_k χ(R_k s) s^k|` for `k = 0..=n`.
    pub term_sups: Vec<f64>,
    /// Every term with `k ≥ 1` is at most `2^{−k}` on the samples.
    pub tail_ok: bool,
    pub s_samples: Vec<f64>,
    /// Sampled `sup_box |D₁u(·, s)|` at each `s` sample.
    pub residual_sups: Vec<f64>,
    /// Least-squares log-log slope of the residual; `None` when it vanishes identically on the samples.
    pub slope: Option<f64>,
}

impl Certificate {
    /// `sup |D₁u| ≤ C |s|^k` behavior: slope at least `k − 0.2`, or an identically zero residual.
    pub fn supports_order(&self, k: usize) -> bool {
        match self.slope {
            None => self.residual_sups.iter().all(|r| *r == 0.0),
            Some(m) => m >= k as f64 - 0.2,
        }
    }
}

/// Least-squares slope of `log y` against `log x` over samples with `y` above `floor`.
pub fn loglog_slope(xs: &[f64], ys: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(_, y)| **y > floor).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

impl ApproxSolution {
    pub fn plan(&self) -> &CutoffPlan {
        &self.plan
    }

    pub fn rank(&self) -> usize {
        self.next.len()
    }

    pub fn value(&self, point: &[f64], s: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rank()];
        for (k, ck) in self.coeffs.iter().enumerate() {
            let w = chi(self.plan.r(k) * s) * s.powi(k as i32);
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(ck) {
                *o += c.eval(point) * w;
            }
        }
        out
    }

    /// `D₁u = Σ R_k χ′(R_k s) s^k c_k + Σ_{k≥1} k s^{k−1}(χ(R_k s) − χ(R_{k−1} s)) c_k − (n+1) χ(R_n s) s^n c_{n+1}`.
    pub fn d1_residual(&self, point: &[f64], s: f64) -> Vec<Complex64> {
        let n = self.coeffs.len() - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); self.rank()];
        let chis: Vec<[f64; 2]> = (0..=n)
            .map(|k| {
                let d = chi_derivatives(self.plan.r(k) * s, 1);
                [d[0], d[1]]
            })
            .collect();
        for (k, ck) in self.coeffs.iter().enumerate() {
            let mut w = self.plan.r(k) * chis[k][1] * s.powi(k as i32);
            if k >= 1 {
                w += k as f64 * s.powi(k as i32 - 1) * (chis[k][0] - chis[k - 1][0]);
            }
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(ck) {
                *o += c.eval(point) * w;
            }
        }
        let w = (n + 1) as f64 * chis[n][0] * s.powi(n as i32);
        if w != 0.0 {
            for (o, c) in out.iter_mut().zip(&self.next) {
                *o -= c.eval(point) * w;
            }
        }
        out
    }

    /// `s_j = 2^{−j} min(2^{−5}, 1/(2R_n))` for `j = 0..count`.
    pub fn s_samples(&self, count: usize) -> Vec<f64> {
        let rn = self.plan.r(self.coeffs.len() - 1);
        let s0 = (1.0f64 / 32.0).min(1.0 / (2.0 * rn));
        (0..count).map(|j| s0 * 2f64.powi(-(j as i32))).collect()
    }

    pub fn certificate(&self) -> Certificate {
        let pts = self.plan.sample_box.points();
        let n = self.coeffs.len() - 1;
        let s_grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let term_sups: Vec<f64> = (0..=n)
            .map(|k| {
                let rk = self.plan.r(k);
                let wmax = s_grid
                    .iter()
                    .map(|&u| {
                        let s = u / rk;
                        (chi(rk * s) * s.powi(k as i32)).abs()
                    })
                    .fold(0.0, f64::max);
                let cmax = self.coeffs[k]
                    .iter()
                    .map(|c| if c.is_zero() { 0.0 } else { pts.par_iter().map(|x| c.eval(x).norm()).reduce(|| 0.0, f64::max) })
                    .fold(0.0, f64::max);
                cmax * wmax
            })
            .collect();
        let tail_ok = term_sups.iter().enumerate().skip(1).all(|(k, t)| *t <= 2f64.powi(-(k as i32)));
        let s_samples = self.s_samples(8);
        let residual_sups: Vec<f64> = s_samples
            .iter()
            .map(|&s| {
                pts.par_iter()
                    .map(|x| self.d1_residual(x, s).iter().map(|z| z.norm()).fold(0.0, f64::max))
                    .reduce(|| 0.0, f64::max)
            })
            .collect();
        let floor = residual_sups.iter().cloned().fold(0.0, f64::max) * 1e-14;
        let slope = if residual_sups.iter().all(|r| *r == 0.0) { None } else { loglog_slope(&s_samples, &residual_sups, floor) };
        Certificate { term_sups, tail_ok, s_samples, residual_sups, slope }
    }

    /// Writes `coords…, s, Re u_i, Im u_i` rows for every box point and `s` value.
    pub fn write_csv(&self, path: &Path, coord_names: &[String], points: &[Vec<f64>], s_values: &[f64]) -> Result<(), Error> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        let mut header: Vec<String> = coord_names.to_vec();
        header.push("s".into());
        for i in 1..=self.rank() {
            header.push(format!("re_u{i}"));
            header.push(format!("im_u{i}"));
        }
        w.write_record(&header).map_err(io)?;
        for &s in s_values {
            for p in points {
                let mut rec: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                rec.push(s.to_string());
                for z in self.value(p, s) {
                    rec.push(z.re.to_string());
                    rec.push(z.im.to_string());
                }
                w.write_record(&rec).map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mizohata() -> NormalFormField {
        let v = normal_form_vars(1);
        NormalFormField::new(vec![-&Poly::var(&v, 1)], None).unwrap()
    }

    #[test]
    fn mizohata_jet() {
        let f = mizohata();
        let v = f.vars().clone();
        let x = Poly::var(&v, 0);
        let t = Poly::var(&v, 1);
        let jet = symbolic_powers(&f, &[x.clone()], 3).unwrap();
        assert_eq!(jet.coeffs[0][0], x);
        assert_eq!(jet.coeffs[1][0], -&t);
        assert_eq!(jet.coeffs[2][0], Poly::constant(&v, GaussRat::complex(0, 1) * GaussRat::from_frac(1, 2)));
        assert!(jet.coeffs[3][0].is_zero());
        assert!(jet.recursion_holds(&f));
        assert!(jet.formal_identity_holds(&f));
    }

    #[test]
    fn constant_initial_data() {
        let f = mizohata();
        let jet = symbolic_powers(&f, &[Poly::one(f.vars())], 4).unwrap();
        assert!(jet.coeffs[1..].iter().all(|c| c[0].is_zero()));
    }

    #[test]
    fn nilpotent_matrix() {
        let v = normal_form_vars(1);
        let (z, o) = (Poly::zero(&v), Poly::one(&v));
        let f = NormalFormField::new(vec![z.clone()], Some(vec![vec![z.clone(), o.clone()], vec![z.clone(), z.clone()]])).unwrap();
        let e1 = symbolic_powers(&f, &[o.clone(), z.clone()], 2).unwrap();
        assert!(e1.coeffs[1].iter().all(|p| p.is_zero()));
        let e2 = symbolic_powers(&f, &[z.clone(), o.clone()], 2).unwrap();
        assert_eq!(e2.coeffs[1], vec![Poly::constant(&v, GaussRat::complex(0, -1)), z.clone()]);
        assert!(e2.coeffs[2].iter().all(|p| p.is_zero()));
        assert!(matches!(symbolic_powers(&f, &[o], 2), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn psi_relation() {
        let f = mizohata();
        let v = f.vars().clone();
        let jets = psi_jets(&f, 0, 1);
        assert_eq!(jets[0], -&Poly::var(&v, 1));
        assert_eq!(jets[1], Poly::constant(&v, GaussRat::complex(0, 1) * GaussRat::from_frac(1, 2)));
        assert_eq!(psi_relation_check(&f, 0, 6), PsiVerdict::Holds);
        let x = Poly::var(&v, 0);
        let g = NormalFormField::new(vec![&x.pow(2) + &Poly::one(&v)], None).unwrap();
        assert_eq!(psi_relation_check(&g, 0, 5), PsiVerdict::Holds);
        assert!(psi_jets(&g, 0, 5).iter().all(|p| p.is_real()));
    }

    #[test]
    fn chi_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(-0.3), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert!(chi(0.75) > 0.0 && chi(0.75) < 1.0);
        assert!((chi(0.75) - 0.5).abs() < 1e-12);
        assert!((chi(0.6) - chi(-0.6)).abs() < 1e-15);
        for u in [0.55, 0.7, 0.85, -0.8] {
            let h = 1e-5;
            let d = chi_derivatives(u, 2);
            let fd1 = (chi(u + h) - chi(u - h)) / (2.0 * h);
            let fd2 = (chi(u + h) - 2.0 * chi(u) + chi(u - h)) / (h * h);
            assert!((d[1] - fd1).abs() < 1e-6, "u={u}");
            assert!((d[2] - fd2).abs() < 1e-3 * (1.0 + d[2].abs()), "u={u}");
        }
    }

    #[test]
    fn plan_and_evaluator() {
        let f = mizohata();
        let x = Poly::var(f.vars(), 0);
        let jet = symbolic_powers(&f, &[x], 3).unwrap();
        let plan = plan_cutoffs(&jet, SampleBox::unit(2, 17)).unwrap();
        assert!(plan.r_log2.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..plan.constants.len() {
            assert!(plan.constants[k] / plan.r(k) <= 2f64.powi(-(k as i32)));
        }
        let sol = assemble_numeric(&jet, &plan).unwrap();
        let u = sol.value(&[0.3, -0.7], 0.0);
        assert!((u[0].re - 0.3).abs() < 1e-15 && u[0].im == 0.0);
        let cert = sol.certificate();
        assert!(cert.tail_ok);
        assert_eq!(cert.slope, None);
        assert!(cert.supports_order(2));
    }

    #[test]
    fn multi_index_count() {
        assert_eq!(multi_indices(2, 3).len(), 10);
        assert_eq!(multi_indices(3, 2).len(), 10);
    }
}
