//! Truncated Taylor expansions at the origin.

use std::fmt;

use super::gauss::GaussRat;
use super::poly::{total_degree, Exps, Poly, VarSet};
use super::ratfun::RatFun;
use crate::Error;

/// A Taylor polynomial known exactly through total degree `order`.
///
/// A negative order means no coefficient is known; this arises when a
/// derivative is taken of an order-zero jet.
#[derive(Clone, PartialEq)]
pub struct Jet {
    order: i32,
    poly: Poly,
}

impl Jet {
    pub fn from_poly(p: &Poly, order: u32) -> Self {
        Jet { order: order as i32, poly: p.truncate(order) }
    }

    pub fn zero(vars: &VarSet, order: u32) -> Self {
        Jet { order: order as i32, poly: Poly::zero(vars) }
    }

    pub fn constant(vars: &VarSet, c: GaussRat, order: u32) -> Self {
        Jet { order: order as i32, poly: Poly::constant(vars, c) }
    }

    /// Known order, or `None` when the jet carries no information.
    pub fn order(&self) -> Option<u32> {
        (self.order >= 0).then_some(self.order as u32)
    }

    pub fn vars(&self) -> &VarSet {
        self.poly.vars()
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn terms(&self) -> &std::collections::BTreeMap<Exps, GaussRat> {
        self.poly.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn constant_term(&self) -> Option<GaussRat> {
        (self.order >= 0).then(|| self.poly.constant_term())
    }

    fn cut(poly: Poly, order: i32) -> Jet {
        if order < 0 {
            Jet { order, poly: Poly::zero(poly.vars()) }
        } else {
            Jet { order, poly: poly.truncate(order as u32) }
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        Jet::cut(&self.poly + &o.poly, order)
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        Jet::cut(&self.poly - &o.poly, order)
    }

    pub fn neg(&self) -> Jet {
        Jet { order: self.order, poly: -&self.poly }
    }

    pub fn scale(&self, c: &GaussRat) -> Jet {
        Jet { order: self.order, poly: self.poly.scale(c) }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        if order < 0 {
            return Jet::cut(Poly::zero(self.vars()), order);
        }
        let k = order as u32;
        let mut out = Poly::zero(self.vars());
        for (e1, c1) in self.poly.terms() {
            let d1 = total_degree(e1);
            for (e2, c2) in o.poly.terms() {
                if d1 + total_degree(e2) > k {
                    continue;
                }
                let e: Exps = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        Jet { order, poly: out }
    }

    /// Partial derivative; the result is known to one order less.
    pub fn derivative(&self, idx: usize) -> Jet {
        Jet::cut(self.poly.derivative(idx), self.order - 1)
    }

    pub fn conj(&self) -> Jet {
        Jet { order: self.order, poly: self.poly.conj() }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order < 0 {
            write!(f, "O(1)")
        } else {
            write!(f, "{} + O({})", self.poly, self.order + 1)
        }
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet({})", self)
    }
}

/// Degree-`k` Taylor expansion of `f` at the origin.
pub fn ratfun_jet(f: &RatFun, k: u32) -> Result<Jet, Error> {
    let vars = f.vars().clone();
    let d0 = f.den().constant_term();
    let d0_inv = d0.inv().ok_or(Error::DenominatorVanishesAtBase)?;
    let num = Jet::from_poly(f.num(), k);
    if f.den().is_constant() {
        return Ok(num.scale(&d0_inv));
    }
    // den = d0 (1 + h) with h(0) = 0, so 1/den = d0⁻¹ Σ (−h)^m and h^m = O(m).
    let h = Jet::from_poly(&(&f.den().scale(&d0_inv) - &Poly::one(&vars)), k);
    let minus_h = h.neg();
    let mut inv = Jet::constant(&vars, GaussRat::one(), k);
    let mut power = Jet::constant(&vars, GaussRat::one(), k);
    for _ in 0..k {
        power = power.mul(&minus_h);
        if power.is_zero() {
            break;
        }
        inv = inv.add(&power);
    }
    Ok(num.mul(&inv).scale(&d0_inv))
}
