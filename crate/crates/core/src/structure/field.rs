//! Symbolic vector fields and sections of T′ in the first-integral coframe.

use std::fmt;

use crate::algebra::matrix::rat_solve;
use crate::algebra::{GaussRat, Poly, RatFun, VarSet};
use crate::Error;

use super::StructureDef;

/// A complex vector field `Σ_c a_c ∂/∂u_c` with rational-function coefficients.
#[derive(Clone, PartialEq)]
pub struct VectorFieldSym {
    coeffs: Vec<RatFun>,
}

impl VectorFieldSym {
    pub fn new(coeffs: Vec<RatFun>) -> Self {
        VectorFieldSym { coeffs }
    }

    pub fn zero(vars: &VarSet) -> Self {
        VectorFieldSym { coeffs: vec![RatFun::zero(vars); vars.len()] }
    }

    /// The coordinate field `∂/∂u_idx`.
    pub fn coordinate(vars: &VarSet, idx: usize) -> Self {
        let mut f = VectorFieldSym::zero(vars);
        f.coeffs[idx] = RatFun::one(vars);
        f
    }

    pub fn from_polys(coeffs: Vec<Poly>) -> Self {
        VectorFieldSym { coeffs: coeffs.into_iter().map(RatFun::from_poly).collect() }
    }

    pub fn coeffs(&self) -> &[RatFun] {
        &self.coeffs
    }

    pub fn coeff(&self, c: usize) -> &RatFun {
        &self.coeffs[c]
    }

    pub fn set_coeff(&mut self, c: usize, v: RatFun) {
        self.coeffs[c] = v;
    }

    pub fn vars(&self) -> &VarSet {
        self.coeffs[0].vars()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Applies the field as a derivation.
    pub fn apply(&self, f: &RatFun) -> RatFun {
        let mut acc = RatFun::zero(f.vars());
        for (c, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let df = f.derivative(c);
            if df.is_zero() {
                continue;
            }
            acc = &acc + &(a * &df);
        }
        acc
    }

    pub fn apply_poly(&self, p: &Poly) -> RatFun {
        self.apply(&RatFun::from_poly(p.clone()))
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &VectorFieldSym) -> VectorFieldSym {
        let coeffs = (0..self.dim())
            .map(|c| &self.apply(&other.coeffs[c]) - &other.apply(&self.coeffs[c]))
            .collect();
        VectorFieldSym { coeffs }
    }

    pub fn conj(&self) -> VectorFieldSym {
        VectorFieldSym { coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    pub fn add(&self, o: &VectorFieldSym) -> VectorFieldSym {
        VectorFieldSym { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &VectorFieldSym) -> VectorFieldSym {
        VectorFieldSym { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, f: &RatFun) -> VectorFieldSym {
        VectorFieldSym { coeffs: self.coeffs.iter().map(|a| a * f).collect() }
    }

    /// Coefficient values at a point.
    pub fn eval(&self, p: &[GaussRat]) -> Result<Vec<GaussRat>, Error> {
        self.coeffs.iter().map(|c| c.eval(p).ok_or(Error::DenominatorVanishesAtBase)).collect()
    }

    /// Re-expresses the field over a larger variable set (missing coordinates get zero).
    pub fn embed(&self, target: &VarSet) -> Option<VectorFieldSym> {
        let src = self.vars().clone();
        let mut out = VectorFieldSym::zero(target);
        for (c, a) in self.coeffs.iter().enumerate() {
            let idx = target.index_of(&src.names()[c])?;
            out.coeffs[idx] = a.remap(target)?;
        }
        Some(out)
    }
}

impl fmt::Display for VectorFieldSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.vars().names().to_vec();
        let mut first = true;
        for (c, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*d/d{}", a, names[c])?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VectorFieldSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorFieldSym({})", self)
    }
}

/// Structure constants `C[j][k][l]` with `[L_j, L_k] = Σ_l C[j][k][l] L_l`.
///
/// Fails if some bracket does not lie in the span of the frame.
pub fn structure_constants(frame: &[VectorFieldSym]) -> Result<Vec<Vec<Vec<RatFun>>>, Error> {
    let n = frame.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let vars = frame[0].vars().clone();
    let dim = frame[0].dim();
    let a: Vec<Vec<RatFun>> = (0..dim).map(|c| frame.iter().map(|l| l.coeffs[c].clone()).collect()).collect();
    let zero_row = vec![RatFun::zero(&vars); n];
    let mut out = vec![vec![zero_row.clone(); n]; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let br = frame[j].bracket(&frame[k]);
            if br.is_zero() {
                continue;
            }
            let c = rat_solve(&a, &br.coeffs).ok_or_else(|| {
                Error::InvalidStructure(format!("bracket [L{}, L{}] leaves the frame span", j + 1, k + 1))
            })?;
            out[k][j] = c.iter().map(|x| -x).collect();
            out[j][k] = c;
        }
    }
    Ok(out)
}

/// A section of T′ written as `Σ cz_j dZ_j + Σ cw_k dW_k`.
#[derive(Clone, PartialEq, Debug)]
pub struct CotangentSection {
    pub cz: Vec<RatFun>,
    pub cw: Vec<RatFun>,
}

impl CotangentSection {
    pub fn zero(def: &StructureDef) -> Self {
        let v = def.vars();
        CotangentSection { cz: vec![RatFun::zero(v); def.nu()], cw: vec![RatFun::zero(v); def.d()] }
    }

    pub fn dz(def: &StructureDef, j: usize) -> Self {
        let mut s = CotangentSection::zero(def);
        s.cz[j] = RatFun::one(def.vars());
        s
    }

    pub fn dw(def: &StructureDef, k: usize) -> Self {
        let mut s = CotangentSection::zero(def);
        s.cw[k] = RatFun::one(def.vars());
        s
    }

    pub fn components(&self) -> impl Iterator<Item = &RatFun> {
        self.cz.iter().chain(self.cw.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(|c| c.is_zero())
    }

    pub fn scale(&self, f: &RatFun) -> Self {
        CotangentSection {
            cz: self.cz.iter().map(|c| c * f).collect(),
            cw: self.cw.iter().map(|c| c * f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        CotangentSection {
            cz: self.cz.iter().zip(&o.cz).map(|(a, b)| a + b).collect(),
            cw: self.cw.iter().zip(&o.cw).map(|(a, b)| a + b).collect(),
        }
    }

    /// Pairing with a vector field, using `dZ_j(V) = V_xj + i V_yj` and `dW_k(V) = V(W_k)`.
    pub fn eval_on(&self, def: &StructureDef, v: &VectorFieldSym) -> RatFun {
        let vars = def.vars();
        let mut acc = RatFun::zero(vars);
        for (j, c) in self.cz.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let val = &v.coeff(def.x(j)).clone() + &v.coeff(def.y(j)).scale(&GaussRat::i());
            acc = &acc + &(c * &val);
        }
        for (k, c) in self.cw.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let val = v.apply_poly(&def.first_integral_w(k));
            acc = &acc + &(c * &val);
        }
        acc
    }

    /// Coefficients in the coordinate coframe `(dx, dy, ds, dt)`.
    pub fn to_coordinate(&self, def: &StructureDef) -> Vec<RatFun> {
        let n = def.n_coords();
        let mut out = vec![RatFun::zero(def.vars()); n];
        for (j, c) in self.cz.iter().enumerate() {
            out[def.x(j)] = &out[def.x(j)] + c;
            out[def.y(j)] = &out[def.y(j)] + &c.scale(&GaussRat::i());
        }
        for (k, c) in self.cw.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = def.first_integral_w(k);
            for (idx, o) in out.iter_mut().enumerate() {
                let dw = w.derivative(idx);
                if !dw.is_zero() {
                    *o = &*o + &c.mul_poly(&dw);
                }
            }
        }
        out
    }
}

impl fmt::Display for CotangentSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.cz.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({})*dZ{}", c, j + 1));
            }
        }
        for (k, c) in self.cw.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({})*dW{}", c, k + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
