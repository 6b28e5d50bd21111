//! Locally integrable structures given by first integrals `Z_j = x_j + i y_j`, `W_k = s_k + i φ_k`.

pub mod field;
pub mod fixtures;

use std::fmt;

use crate::algebra::matrix::{adjugate, combinations, det, exact_rank, submatrix};
use crate::algebra::{hermitian_inertia, GaussRat, HermitianMatrix, Inertia, Poly, RatFun, VarSet};
use crate::Error;

pub use field::{structure_constants, CotangentSection, VectorFieldSym};

/// Variable names in canonical order `x1..xν, y1..yν, s1..sd, t1..tμ`.
pub fn canonical_vars(nu: usize, d: usize, mu: usize) -> VarSet {
    let mut names = Vec::new();
    names.extend((1..=nu).map(|j| format!("x{j}")));
    names.extend((1..=nu).map(|j| format!("y{j}")));
    names.extend((1..=d).map(|k| format!("s{k}")));
    names.extend((1..=mu).map(|r| format!("t{r}")));
    VarSet::new(&names)
}

/// Derivatives of the φ_k and the matrix `W_s = I + i φ_s` with its inverse.
#[derive(Clone, Debug)]
pub struct PhiJacobians {
    /// `∂φ_k/∂z_j`, d×ν.
    pub phi_z: Vec<Vec<Poly>>,
    /// `∂φ_k/∂z̄_j`, d×ν.
    pub phi_zbar: Vec<Vec<Poly>>,
    pub phi_s: Vec<Vec<Poly>>,
    pub phi_t: Vec<Vec<Poly>>,
    pub w_s: Vec<Vec<Poly>>,
    pub det_w_s: Poly,
    pub inv_w_s: Vec<Vec<RatFun>>,
}

#[derive(Clone)]
pub struct StructureDef {
    nu: usize,
    d: usize,
    mu: usize,
    vars: VarSet,
    phi: Vec<Poly>,
    jac: PhiJacobians,
    frame: Vec<VectorFieldSym>,
}

impl PartialEq for StructureDef {
    fn eq(&self, o: &Self) -> bool {
        self.nu == o.nu && self.d == o.d && self.mu == o.mu && self.phi == o.phi
    }
}

impl fmt::Debug for StructureDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructureDef(nu={}, d={}, mu={}, phi={:?})", self.nu, self.d, self.mu, self.phi)
    }
}

impl StructureDef {
    /// Validates the data and precomputes Jacobians and frame.
    ///
    /// `phi` may be written over any variable set whose names are canonical.
    pub fn new(nu: usize, d: usize, mu: usize, phi: Vec<Poly>) -> Result<Self, Error> {
        if phi.len() != d {
            return Err(Error::DimensionMismatch(format!("expected {} phi entries, found {}", d, phi.len())));
        }
        let vars = canonical_vars(nu, d, mu);
        let mut mapped = Vec::with_capacity(d);
        for (k, p) in phi.iter().enumerate() {
            let q = p.remap(&vars).ok_or_else(|| {
                Error::InvalidStructure(format!("phi{} uses a variable outside {:?}", k + 1, vars))
            })?;
            if !q.is_real() {
                return Err(Error::NonRealPhi(k + 1));
            }
            if !q.constant_term().is_zero() {
                return Err(Error::InvalidStructure(format!("phi{} does not vanish at 0", k + 1)));
            }
            if (0..vars.len()).any(|c| !q.derivative(c).constant_term().is_zero()) {
                return Err(Error::InvalidStructure(format!("phi{} has a nonzero first derivative at 0", k + 1)));
            }
            mapped.push(q);
        }
        let mut def = StructureDef {
            nu,
            d,
            mu,
            vars,
            phi: mapped,
            jac: PhiJacobians {
                phi_z: Vec::new(),
                phi_zbar: Vec::new(),
                phi_s: Vec::new(),
                phi_t: Vec::new(),
                w_s: Vec::new(),
                det_w_s: Poly::zero(&VarSet::new::<&str>(&[])),
                inv_w_s: Vec::new(),
            },
            frame: Vec::new(),
        };
        def.jac = def.compute_jacobians();
        def.frame = def.compute_frame();
        Ok(def)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn mu(&self) -> usize {
        self.mu
    }
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }
    pub fn phi(&self) -> &[Poly] {
        &self.phi
    }
    pub fn n_coords(&self) -> usize {
        2 * self.nu + self.d + self.mu
    }
    /// Rank of the structure bundle (number of frame fields).
    pub fn rank(&self) -> usize {
        self.nu + self.mu
    }
    /// Number of first integrals.
    pub fn corank(&self) -> usize {
        self.nu + self.d
    }
    pub fn x(&self, j: usize) -> usize {
        j
    }
    pub fn y(&self, j: usize) -> usize {
        self.nu + j
    }
    pub fn s(&self, k: usize) -> usize {
        2 * self.nu + k
    }
    pub fn t(&self, r: usize) -> usize {
        2 * self.nu + self.d + r
    }

    pub fn jacobians(&self) -> &PhiJacobians {
        &self.jac
    }

    /// Frame `L_1..L_ν` (z̄-type) followed by `L_{ν+1}..L_{ν+μ}` (t-type).
    pub fn frame(&self) -> &[VectorFieldSym] {
        &self.frame
    }

    pub fn first_integral_z(&self, j: usize) -> Poly {
        &Poly::var(&self.vars, self.x(j)) + &Poly::var(&self.vars, self.y(j)).scale(&GaussRat::i())
    }

    pub fn first_integral_w(&self, k: usize) -> Poly {
        &Poly::var(&self.vars, self.s(k)) + &self.phi[k].scale(&GaussRat::i())
    }

    /// All first integrals, `Z` before `W`.
    pub fn first_integrals(&self) -> Vec<Poly> {
        (0..self.nu)
            .map(|j| self.first_integral_z(j))
            .chain((0..self.d).map(|k| self.first_integral_w(k)))
            .collect()
    }

    /// `∂/∂z_j = ½(∂x_j − i∂y_j)`.
    pub fn d_z(&self, p: &Poly, j: usize) -> Poly {
        (&p.derivative(self.x(j)) - &p.derivative(self.y(j)).scale(&GaussRat::i())).scale(&GaussRat::from_frac(1, 2))
    }

    /// `∂/∂z̄_j = ½(∂x_j + i∂y_j)`.
    pub fn d_zbar(&self, p: &Poly, j: usize) -> Poly {
        (&p.derivative(self.x(j)) + &p.derivative(self.y(j)).scale(&GaussRat::i())).scale(&GaussRat::from_frac(1, 2))
    }

    fn compute_jacobians(&self) -> PhiJacobians {
        let v = &self.vars;
        let phi_z = self.phi.iter().map(|p| (0..self.nu).map(|j| self.d_z(p, j)).collect()).collect();
        let phi_zbar = self.phi.iter().map(|p| (0..self.nu).map(|j| self.d_zbar(p, j)).collect()).collect();
        let phi_s: Vec<Vec<Poly>> =
            self.phi.iter().map(|p| (0..self.d).map(|k| p.derivative(self.s(k))).collect()).collect();
        let phi_t = self.phi.iter().map(|p| (0..self.mu).map(|r| p.derivative(self.t(r))).collect()).collect();
        let w_s: Vec<Vec<Poly>> = (0..self.d)
            .map(|k| {
                (0..self.d)
                    .map(|l| {
                        let id = if k == l { Poly::one(v) } else { Poly::zero(v) };
                        &id + &phi_s[k][l].scale(&GaussRat::i())
                    })
                    .collect()
            })
            .collect();
        let (det_w_s, inv_w_s) = if self.d == 0 {
            (Poly::one(v), Vec::new())
        } else {
            let dt = det(&w_s);
            let adj = adjugate(&w_s);
            let inv = adj
                .iter()
                .map(|row| row.iter().map(|a| RatFun::new(a.clone(), dt.clone())).collect())
                .collect();
            (dt, inv)
        };
        PhiJacobians { phi_z, phi_zbar, phi_s, phi_t, w_s, det_w_s, inv_w_s }
    }

    /// `N_k = Σ_ℓ (W_s⁻¹)_{ℓk} ∂/∂s_ℓ`, dual to `dW` on the s-directions.
    pub fn n_field(&self, k: usize) -> VectorFieldSym {
        let mut f = VectorFieldSym::zero(&self.vars);
        for l in 0..self.d {
            f.set_coeff(self.s(l), self.jac.inv_w_s[l][k].clone());
        }
        f
    }

    fn compute_frame(&self) -> Vec<VectorFieldSym> {
        let v = &self.vars;
        let ns: Vec<VectorFieldSym> = (0..self.d).map(|k| self.n_field(k)).collect();
        let minus_i = RatFun::constant(v, GaussRat::complex(0, -1));
        let correction = |derivs: Vec<&Poly>| {
            let mut acc = VectorFieldSym::zero(v);
            for (k, dphi) in derivs.into_iter().enumerate() {
                if dphi.is_zero() {
                    continue;
                }
                acc = acc.add(&ns[k].scale(&(&minus_i * &RatFun::from_poly(dphi.clone()))));
            }
            acc
        };
        let mut frame = Vec::with_capacity(self.rank());
        for j in 0..self.nu {
            let mut base = VectorFieldSym::zero(v);
            base.set_coeff(self.x(j), RatFun::constant(v, GaussRat::from_frac(1, 2)));
            base.set_coeff(self.y(j), RatFun::constant(v, &GaussRat::i() * &GaussRat::from_frac(1, 2)));
            let derivs = (0..self.d).map(|k| &self.jac.phi_zbar[k][j]).collect();
            frame.push(base.add(&correction(derivs)));
        }
        for r in 0..self.mu {
            let base = VectorFieldSym::coordinate(v, self.t(r));
            let derivs = (0..self.d).map(|k| &self.jac.phi_t[k][r]).collect();
            frame.push(base.add(&correction(derivs)));
        }
        frame
    }

    /// Evaluates `φ_t` at a point.
    pub fn phi_t_at(&self, p: &[GaussRat]) -> Vec<Vec<GaussRat>> {
        self.jac.phi_t.iter().map(|row| row.iter().map(|q| q.eval(p)).collect()).collect()
    }
}

/// `max(d − rank φ_t(p), 0)`.
pub fn characteristic_dim(def: &StructureDef, p: &[GaussRat]) -> usize {
    let rank = if def.mu() == 0 { 0 } else { exact_rank(&def.phi_t_at(p)) };
    def.d().saturating_sub(rank)
}

/// Where a kernel vector came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    User,
    /// Unit vector `e_ℓ` (used when φ_t vanishes identically).
    Unit(usize),
    /// Adjoint recipe for rows `delta`, columns `gamma` and extra row `ell` (0-based).
    Adjoint { delta: Vec<usize>, gamma: Vec<usize>, ell: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    pub b: Vec<Poly>,
    pub provenance: Provenance,
}

impl fmt::Display for KernelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.b.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub enum KernelMode {
    User(Vec<Vec<Poly>>),
    Auto,
}

/// Result of a kernel-vector computation.
#[derive(Clone, Debug)]
pub struct KernelSet {
    pub vectors: Vec<KernelVector>,
    /// Generic rank R of φ_t (size of the largest not identically zero minor).
    pub generic_rank: usize,
    /// True when R = d, so that T⁰ is generically trivial.
    pub no_kernel: bool,
}

/// `b · φ_t` as a row of μ polynomials.
pub fn kernel_residual(def: &StructureDef, b: &[Poly]) -> Vec<Poly> {
    let jac = def.jacobians();
    (0..def.mu())
        .map(|r| {
            let mut acc = Poly::zero(def.vars());
            for (k, bk) in b.iter().enumerate() {
                acc = &acc + &(bk * &jac.phi_t[k][r]);
            }
            acc
        })
        .collect()
}

/// Largest size of a minor of φ_t that is not identically zero.
pub fn generic_rank(def: &StructureDef) -> usize {
    let pt = &def.jacobians().phi_t;
    for size in (1..=def.d().min(def.mu())).rev() {
        for rows in combinations(def.d(), size) {
            for cols in combinations(def.mu(), size) {
                if !det(&submatrix(pt, &rows, &cols)).is_zero() {
                    return size;
                }
            }
        }
    }
    0
}

pub fn kernel_vectors(def: &StructureDef, mode: KernelMode) -> Result<KernelSet, Error> {
    let r = generic_rank(def);
    let no_kernel = r == def.d();
    match mode {
        KernelMode::User(list) => {
            let mut vectors = Vec::new();
            for (index, b) in list.into_iter().enumerate() {
                if b.len() != def.d() {
                    return Err(Error::DimensionMismatch(format!(
                        "kernel vector {} has {} entries, expected {}",
                        index + 1,
                        b.len(),
                        def.d()
                    )));
                }
                let b: Vec<Poly> = b
                    .iter()
                    .map(|p| p.remap(def.vars()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::InvalidStructure(format!("kernel vector {} uses unknown variables", index + 1)))?;
                if b.iter().any(|p| !p.is_real()) {
                    return Err(Error::InvalidStructure(format!("kernel vector {} is not real", index + 1)));
                }
                if let Some(res) = kernel_residual(def, &b).into_iter().find(|p| !p.is_zero()) {
                    return Err(Error::KernelVerificationFailed { index: index + 1, residual: res.to_string() });
                }
                vectors.push(KernelVector { b, provenance: Provenance::User });
            }
            Ok(KernelSet { vectors, generic_rank: r, no_kernel })
        }
        KernelMode::Auto => {
            let v = def.vars();
            if no_kernel {
                return Ok(KernelSet { vectors: Vec::new(), generic_rank: r, no_kernel });
            }
            if r == 0 {
                let vectors = (0..def.d())
                    .map(|l| KernelVector {
                        b: (0..def.d()).map(|k| if k == l { Poly::one(v) } else { Poly::zero(v) }).collect(),
                        provenance: Provenance::Unit(l),
                    })
                    .collect();
                return Ok(KernelSet { vectors, generic_rank: 0, no_kernel });
            }
            let pt = &def.jacobians().phi_t;
            let mut vectors = Vec::new();
            for delta in combinations(def.d(), r) {
                for gamma in combinations(def.mu(), r) {
                    let block = submatrix(pt, &delta, &gamma);
                    let big_delta = det(&block);
                    if big_delta.is_zero() {
                        continue;
                    }
                    let adj = adjugate(&block);
                    for ell in (0..def.d()).filter(|l| !delta.contains(l)) {
                        let mut b = vec![Poly::zero(v); def.d()];
                        b[ell] = big_delta.clone();
                        for (pos, &row) in delta.iter().enumerate() {
                            let mut acc = Poly::zero(v);
                            for (q, &col) in gamma.iter().enumerate() {
                                acc = &acc + &(&pt[ell][col] * &adj[q][pos]);
                            }
                            b[row] = -&acc;
                        }
                        debug_assert!(kernel_residual(def, &b).iter().all(|p| p.is_zero()));
                        vectors.push(KernelVector {
                            b,
                            provenance: Provenance::Adjoint { delta: delta.clone(), gamma: gamma.clone(), ell },
                        });
                    }
                }
            }
            if let Some((i, res)) = vectors
                .iter()
                .enumerate()
                .find_map(|(i, kv)| kernel_residual(def, &kv.b).into_iter().find(|p| !p.is_zero()).map(|p| (i, p)))
            {
                return Err(Error::KernelVerificationFailed { index: i + 1, residual: res.to_string() });
            }
            Ok(KernelSet { vectors, generic_rank: r, no_kernel })
        }
    }
}

/// `θ_b = b(−2i φ_z dZ + (I + iφ_s) dW)`.
pub fn theta_of_b(def: &StructureDef, b: &[Poly]) -> CotangentSection {
    let v = def.vars();
    let jac = def.jacobians();
    let cz = (0..def.nu())
        .map(|j| {
            let mut acc = Poly::zero(v);
            for (k, bk) in b.iter().enumerate() {
                acc = &acc + &(bk * &jac.phi_z[k][j]);
            }
            RatFun::from_poly(acc.scale(&GaussRat::complex(0, -2)))
        })
        .collect();
    let cw = (0..def.d())
        .map(|m| {
            let mut acc = Poly::zero(v);
            for (k, bk) in b.iter().enumerate() {
                acc = &acc + &(bk * &jac.w_s[k][m]);
            }
            RatFun::from_poly(acc)
        })
        .collect();
    CotangentSection { cz, cw }
}

#[derive(Clone, Debug)]
pub struct LeviReport {
    pub point: Vec<GaussRat>,
    pub covector: Vec<GaussRat>,
    pub matrix: HermitianMatrix,
    pub inertia: Inertia,
}

/// Levi form `(1/2i) ξ([L_j, L̄_k]_p)` on the frame at `p`, with ξ in the coordinate coframe.
pub fn levi_form(def: &StructureDef, p: &[GaussRat], xi: &[GaussRat]) -> Result<LeviReport, Error> {
    let n = def.n_coords();
    if p.len() != n || xi.len() != n {
        return Err(Error::DimensionMismatch(format!("point and covector need {} coordinates", n)));
    }
    if xi.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroCovector);
    }
    if xi.iter().any(|c| !c.is_real()) {
        return Err(Error::InvalidStructure("covector must be real".into()));
    }
    let pair = |vals: &[GaussRat]| {
        let mut acc = GaussRat::zero();
        for (a, b) in xi.iter().zip(vals) {
            acc += &(a * b);
        }
        acc
    };
    let frame = def.frame();
    for (j, l) in frame.iter().enumerate() {
        if !pair(&l.eval(p)?).is_zero() {
            return Err(Error::NotCharacteristic(j + 1));
        }
    }
    let factor = &GaussRat::complex(0, -1) * &GaussRat::from_frac(1, 2);
    let m = frame.len();
    let mut entries = vec![vec![GaussRat::zero(); m]; m];
    for j in 0..m {
        for k in 0..m {
            let br = frame[j].bracket(&frame[k].conj());
            entries[j][k] = &pair(&br.eval(p)?) * &factor;
        }
    }
    let matrix = HermitianMatrix::new(entries)?;
    let inertia = hermitian_inertia(&matrix);
    Ok(LeviReport { point: p.to_vec(), covector: xi.to_vec(), matrix, inertia })
}
