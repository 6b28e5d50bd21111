//! FBI-type transform of sampled data, wave-front direction scans and the sign condition.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{GaussRat, NumPoly, Poly};
use crate::approx::{chi, psi_jets, NormalFormField};
use crate::structure::{levi_form, StructureDef, VectorFieldSym};
use crate::Error;

pub const DEFAULT_KAPPA: f64 = 0.25;
pub const DEFAULT_INTERVALS: usize = 256;
/// Default half-width of the sampling box around the base point.
pub const DEFAULT_BOX: f64 = 0.85;
pub const DEFAULT_DIRECTIONS: usize = 8;

/// Thresholds for direction classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub s_min: f64,
    pub singular_above: f64,
    /// Magnitudes below `floor_ratio · max |F|` are excluded from the slope fit.
    pub floor_ratio: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { s_min: 4.0, singular_above: -1.5, floor_ratio: 1e-12 }
    }
}

/// Composite Simpson weights for `n` intervals of width `h`.
pub fn simpson_weights(n: usize, h: f64) -> Result<Vec<f64>, Error> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::DegenerateGrid(format!("Simpson rule needs an even number of intervals, got {n}")));
    }
    Ok((0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect())
}

/// `(x, t, weight · window, values)` for every grid node where the weighted window is nonzero.
#[derive(Clone, Debug)]
struct Node {
    x: f64,
    t: f64,
    w: f64,
    values: Vec<Complex64>,
}

/// Tensor-product cutoff around the box center: `1` for `|d| ≤ plateau`, smooth
/// transition through `χ`, and `0` for `|d| ≥ support` in each coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub plateau: f64,
    pub support: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window { plateau: 0.7, support: 0.83 }
    }
}

impl Window {
    /// Scales the default window to a box of half-width `half`.
    pub fn for_box(half: f64) -> Self {
        let d = Window::default();
        let r = half / DEFAULT_BOX;
        Window { plateau: d.plateau * r, support: d.support * r }
    }

    /// `χ(d/a)`.
    pub fn plain(a: f64) -> Self {
        Window { plateau: 0.5 * a, support: a }
    }

    pub fn bump(&self, d: f64) -> f64 {
        let ad = d.abs();
        if ad <= self.plateau {
            1.0
        } else {
            chi(0.5 + (ad - self.plateau) / (2.0 * (self.support - self.plateau)))
        }
    }
}

/// Grid samples of `u₀` on a box, multiplied by a cutoff window.
#[derive(Clone, Debug)]
pub struct SampledData {
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub nx: usize,
    pub nt: usize,
    pub window: Option<Window>,
    rank: usize,
    nodes: Vec<Node>,
}

impl SampledData {
    /// Samples `f` on a uniform grid, multiplied by `window` centered in the box.
    /// The window support must fit strictly inside the box.
    pub fn from_fn<F>(x_range: (f64, f64), t_range: (f64, f64), nx: usize, nt: usize, window: Option<Window>, f: F) -> Result<Self, Error>
    where
        F: Fn(f64, f64) -> Vec<Complex64> + Sync,
    {
        let hx = (x_range.1 - x_range.0) / nx.max(1) as f64;
        let ht = (t_range.1 - t_range.0) / nt.max(1) as f64;
        if !(hx > 0.0 && ht > 0.0) {
            return Err(Error::DegenerateGrid("empty sampling box".into()));
        }
        let wx = simpson_weights(nx, hx)?;
        let wt = simpson_weights(nt, ht)?;
        let cx = 0.5 * (x_range.0 + x_range.1);
        let ct = 0.5 * (t_range.0 + t_range.1);
        if let Some(w) = window {
            let half = 0.5 * (x_range.1 - x_range.0).min(t_range.1 - t_range.0);
            if !(w.plateau >= 0.0 && w.plateau < w.support && w.support < half) {
                return Err(Error::DegenerateGrid(format!(
                    "window (plateau {}, support {}) does not fit strictly inside the box",
                    w.plateau, w.support
                )));
            }
        }
        let cut = |x: f64, t: f64| match window {
            Some(w) => w.bump(x - cx) * w.bump(t - ct),
            None => 1.0,
        };
        let nodes: Vec<Option<Node>> = (0..(nx + 1) * (nt + 1))
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / (nt + 1), idx % (nt + 1));
                let x = x_range.0 + i as f64 * hx;
                let t = t_range.0 + j as f64 * ht;
                let w = wx[i] * wt[j] * cut(x, t);
                if w == 0.0 {
                    return None;
                }
                Some(Node { x, t, w, values: f(x, t) })
            })
            .collect();
        let nodes: Vec<Node> = nodes.into_iter().flatten().collect();
        let rank = nodes.first().map(|n| n.values.len()).unwrap_or(0);
        for n in &nodes {
            if n.values.len() != rank {
                return Err(Error::DimensionMismatch("data components vary across the grid".into()));
            }
            if n.values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::DegenerateGrid(format!("non-finite data at ({}, {})", n.x, n.t)));
            }
        }
        Ok(SampledData { x_range, t_range, nx, nt, window, rank, nodes })
    }

    /// Samples a scalar rational function `num/den` in `(x1, t1)`.
    pub fn from_ratfun(
        num: &Poly,
        den: &Poly,
        x_range: (f64, f64),
        t_range: (f64, f64),
        n: usize,
        window: Option<Window>,
    ) -> Result<Self, Error> {
        let (p, q) = (NumPoly::new(num), NumPoly::new(den));
        Self::from_fn(x_range, t_range, n, n, window, |x, t| vec![p.eval(&[x, t]) / q.eval(&[x, t])])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// `F(p; ζ) = Σ w χ̃ u₀(p′) exp(i ζ·(p − p′) − κ|ζ||p − p′|²)` per component.
pub fn fbi_transform(data: &SampledData, kappa: f64, basepoint: (f64, f64), covector: (f64, f64)) -> Result<Vec<Complex64>, Error> {
    if !(kappa > 0.0) {
        return Err(Error::DegenerateGrid(format!("kappa must be positive, got {kappa}")));
    }
    let norm = covector.0.hypot(covector.1);
    if norm == 0.0 {
        return Err(Error::ZeroCovector);
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); data.rank];
    for n in &data.nodes {
        let dx = basepoint.0 - n.x;
        let dt = basepoint.1 - n.t;
        let damp = -kappa * norm * (dx * dx + dt * dt);
        if damp < -745.0 {
            continue;
        }
        let e = Complex64::from_polar(n.w * damp.exp(), covector.0 * dx + covector.1 * dt);
        for (a, v) in acc.iter_mut().zip(&n.values) {
            *a += v * e;
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Smooth,
    Singular,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Smooth => "Smooth",
            Classification::Singular => "Singular",
            Classification::Inconclusive => "Inconclusive",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct FbiScan {
    pub kappa: f64,
    pub basepoint: (f64, f64),
    pub config: ScanConfig,
    /// Unit covectors `(ξ, τ)`.
    pub directions: Vec<(f64, f64)>,
    pub radii: Vec<f64>,
    /// `|F|` (Euclidean over components) indexed `[direction][radius]`.
    pub magnitudes: Vec<Vec<f64>>,
    pub slopes: Vec<f64>,
    pub classes: Vec<Classification>,
    /// Whether each direction lies in the cone `|τ| < |ξ|/√2`.
    pub in_cone: Vec<bool>,
}

pub fn geometric_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Least-squares log-log slope over samples above the floor; a secant with 2–3 points,
/// and `−∞` when fewer than two samples clear the floor.
pub fn fit_slope(radii: &[f64], mags: &[f64], floor_ratio: f64) -> f64 {
    let max = mags.iter().cloned().fold(0.0, f64::max);
    let floor = (max * floor_ratio).max(f64::MIN_POSITIVE);
    let pts: Vec<(f64, f64)> = radii.iter().zip(mags).filter(|(_, m)| **m > floor).map(|(r, m)| (r.ln(), m.ln())).collect();
    match pts.len() {
        0 | 1 => f64::NEG_INFINITY,
        2 | 3 => {
            let (a, b) = (pts[0], pts[pts.len() - 1]);
            (b.1 - a.1) / (b.0 - a.0)
        }
        _ => crate::approx::loglog_slope(
            &pts.iter().map(|p| p.0.exp()).collect::<Vec<_>>(),
            &pts.iter().map(|p| p.1.exp()).collect::<Vec<_>>(),
            0.0,
        )
        .unwrap_or(f64::NAN),
    }
}

pub fn classify(slope: f64, config: &ScanConfig) -> Classification {
    if slope <= -config.s_min {
        Classification::Smooth
    } else if slope >= config.singular_above {
        Classification::Singular
    } else {
        Classification::Inconclusive
    }
}

/// Scans `n_dirs` directions `θ_i = 2πi/n_dirs` at the given radii.
pub fn direction_scan(
    data: &SampledData,
    kappa: f64,
    basepoint: (f64, f64),
    n_dirs: usize,
    radii: &[f64],
    config: ScanConfig,
) -> Result<FbiScan, Error> {
    if radii.len() < 4 {
        return Err(Error::DegenerateGrid(format!("slope fit needs at least 4 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) || radii[0] <= 0.0 {
        return Err(Error::DegenerateGrid("radii must be positive and increasing".into()));
    }
    if radii[radii.len() - 1] / radii[0] < 100.0 * (1.0 - 1e-9) {
        return Err(Error::DegenerateGrid("radii must span at least two decades".into()));
    }
    let directions: Vec<(f64, f64)> = (0..n_dirs)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n_dirs as f64;
            let (s, c) = th.sin_cos();
            (if c.abs() < 1e-15 { 0.0 } else { c }, if s.abs() < 1e-15 { 0.0 } else { s })
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..n_dirs).flat_map(|d| (0..radii.len()).map(move |r| (d, r))).collect();
    let values: Vec<Result<f64, Error>> = jobs
        .par_iter()
        .map(|&(d, r)| {
            let (xi, tau) = directions[d];
            let f = fbi_transform(data, kappa, basepoint, (radii[r] * xi, radii[r] * tau))?;
            Ok(f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        })
        .collect();
    let mut magnitudes = vec![vec![0.0; radii.len()]; n_dirs];
    for ((d, r), v) in jobs.into_iter().zip(values) {
        magnitudes[d][r] = v?;
    }
    let slopes: Vec<f64> = magnitudes.iter().map(|m| fit_slope(radii, m, config.floor_ratio)).collect();
    let classes = slopes.iter().map(|s| classify(*s, &config)).collect();
    let in_cone = directions.iter().map(|(xi, tau)| tau.abs() < xi.abs() / 2f64.sqrt()).collect();
    Ok(FbiScan { kappa, basepoint, config, directions, radii: radii.to_vec(), magnitudes, slopes, classes, in_cone })
}

impl FbiScan {
    /// Index of the direction closest to `(ξ, τ)`.
    pub fn nearest_direction(&self, xi: f64, tau: f64) -> usize {
        let n = xi.hypot(tau);
        let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
        for (i, (a, b)) in self.directions.iter().enumerate() {
            let c = (a * xi + b * tau) / n;
            if c > best {
                best = c;
                idx = i;
            }
        }
        idx
    }

    /// Rows `direction_index, xi, tau, radius, abs_F`.
    pub fn write_csv(&self, path: &Path) -> Result<(), Error> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["direction_index", "xi", "tau", "radius", "abs_F"]).map_err(io)?;
        for (d, (xi, tau)) in self.directions.iter().enumerate() {
            for (r, rad) in self.radii.iter().enumerate() {
                w.write_record([d.to_string(), xi.to_string(), tau.to_string(), rad.to_string(), self.magnitudes[d][r].to_string()])
                    .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    /// Rows `direction_index, xi, tau, slope, classification, in_cone`.
    pub fn write_slopes_csv(&self, path: &Path) -> Result<(), Error> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["direction_index", "xi", "tau", "slope", "classification", "in_cone"]).map_err(io)?;
        for (d, (xi, tau)) in self.directions.iter().enumerate() {
            w.write_record([
                d.to_string(),
                xi.to_string(),
                tau.to_string(),
                self.slopes[d].to_string(),
                self.classes[d].to_string(),
                self.in_cone[d].to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// `∂b/∂t(0)·ξ⁰`, exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SignReport {
    pub value: GaussRat,
    pub holds: bool,
}

pub fn sign_condition(f: &NormalFormField, xi0: &[GaussRat]) -> Result<SignReport, Error> {
    if xi0.len() != f.n() {
        return Err(Error::DimensionMismatch(format!("xi0 needs {} components", f.n())));
    }
    if xi0.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroCovector);
    }
    let origin = vec![GaussRat::zero(); f.n() + 1];
    let mut value = GaussRat::zero();
    for (bj, c) in f.b().iter().zip(xi0) {
        value += &(&bj.derivative(f.t_index()).eval(&origin) * c);
    }
    let holds = value.is_real() && value.re > num_rational::BigRational::from_integer(0.into());
    Ok(SignReport { value, holds })
}

/// The smallness requirement `(3κ/2)(1 + sup|Im ψ|) < ρ/16`, with `ρ = ∂b/∂t(0)·ξ⁰ / |ξ⁰|`.
#[derive(Clone, Debug)]
pub struct KappaCheck {
    pub rho: f64,
    pub sup_im_psi: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl KappaCheck {
    pub fn ok(&self) -> bool {
        self.lhs < self.rhs
    }
}

/// Samples `Im ψ` from its s-jet of order `order` on `[−h, h]^{N+1} × [−δ, δ]`.
pub fn kappa_check(f: &NormalFormField, xi0: &[GaussRat], kappa: f64, half_width: f64, delta: f64, order: usize) -> Result<KappaCheck, Error> {
    let sign = sign_condition(f, xi0)?;
    let norm = xi0.iter().map(|c| c.to_f64_pair().0.powi(2)).sum::<f64>().sqrt();
    let rho = sign.value.to_f64_pair().0 / norm;
    let jets: Vec<Vec<NumPoly>> = (0..f.n()).map(|j| psi_jets(f, j, order).iter().map(NumPoly::new).collect()).collect();
    let dim = f.n() + 1;
    let g = 9usize;
    let total = g.pow(dim as u32);
    let s_vals: Vec<f64> = (0..=8).map(|i| -delta + 2.0 * delta * i as f64 / 8.0).collect();
    let sup = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let p: Vec<f64> = (0..dim)
                .map(|_| {
                    let i = idx % g;
                    idx /= g;
                    -half_width + 2.0 * half_width * i as f64 / (g - 1) as f64
                })
                .collect();
            let mut best = 0.0f64;
            for &s in &s_vals {
                let mut sq = 0.0;
                for comp in &jets {
                    let mut v = Complex64::new(0.0, 0.0);
                    let mut fact = 1.0;
                    for (l, c) in comp.iter().enumerate() {
                        if l > 0 {
                            fact *= l as f64;
                        }
                        v += c.eval(&p) * s.powi(l as i32) / fact;
                    }
                    sq += v.im * v.im;
                }
                best = best.max(sq.sqrt());
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(KappaCheck { rho, sup_im_psi: sup, lhs: 1.5 * kappa * (1.0 + sup), rhs: rho / 16.0 })
}

/// Normal form extracted from a frame field with negative Levi value.
#[derive(Clone, Debug)]
pub struct NormalFormReport {
    pub witness_index: usize,
    pub witness: VectorFieldSym,
    pub levi_value: GaussRat,
    pub field: NormalFormField,
    pub xi0: Vec<GaussRat>,
    pub sign: SignReport,
}

/// Picks a frame field `L_j` with negative Levi value and, when `Re L_j = ∂/∂t_r` with `L_j` involving
/// only `∂t_r` and `∂s`, writes it as `∂t + i b·∂x` on the slice through `p`.
pub fn levi_to_normal_form(def: &StructureDef, p: &[GaussRat], xi: &[GaussRat]) -> Result<NormalFormReport, Error> {
    if def.d() == 0 {
        return Err(Error::NoNegativeDirection);
    }
    let levi = levi_form(def, p, xi)?;
    if levi.inertia.neg == 0 {
        return Err(Error::NoNegativeDirection);
    }
    let m = levi.matrix.dim();
    let Some(j) = (0..m).find(|&j| {
        let h = levi.matrix.entry(j, j);
        h.re < num_rational::BigRational::from_integer(0.into())
    }) else {
        return Err(Error::RectificationUnavailable("no frame field has a negative Levi value".into()));
    };
    let levi_value = levi.matrix.entry(j, j).clone();
    let witness = def.frame()[j].clone();
    if j < def.nu() {
        return Err(Error::RectificationUnavailable(format!("witness L{} is a z-bar field", j + 1)));
    }
    if def.jacobians().phi_s.iter().flatten().any(|q| !q.is_zero()) {
        return Err(Error::RectificationUnavailable("phi depends on s, so Re L is not a coordinate field".into()));
    }
    let r = j - def.nu();
    let t_idx = def.t(r);
    let d = def.d();
    let nf_vars = crate::approx::normal_form_vars(d);
    let mut subst: Vec<Poly> = p.iter().map(|c| Poly::constant(&nf_vars, c.clone())).collect();
    for k in 0..d {
        subst[def.s(k)] = &subst[def.s(k)] + &Poly::var(&nf_vars, k);
    }
    subst[t_idx] = &subst[t_idx] + &Poly::var(&nf_vars, d);
    let b: Vec<Poly> = (0..d).map(|k| (-&def.jacobians().phi_t[k][r]).substitute(&subst)).collect();
    let field = NormalFormField::new(b, None)?;
    let xi0: Vec<GaussRat> = (0..d).map(|k| xi[def.s(k)].clone()).collect();
    let sign = sign_condition(&field, &xi0)?;
    Ok(NormalFormReport { witness_index: j, witness, levi_value, field, xi0, sign })
}
