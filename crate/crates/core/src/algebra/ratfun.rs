//! Quotients of polynomials, compared by cross-multiplication.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gauss::GaussRat;
use super::poly::{total_degree, Poly, VarSet};

#[derive(Clone)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    /// Builds `num / den`; panics if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RatFun { num, den };
        r.normalize();
        r
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.vars());
        RatFun { num: p, den }
    }

    pub fn zero(vars: &VarSet) -> Self {
        RatFun::from_poly(Poly::zero(vars))
    }

    pub fn one(vars: &VarSet) -> Self {
        RatFun::from_poly(Poly::one(vars))
    }

    pub fn constant(vars: &VarSet, c: GaussRat) -> Self {
        RatFun::from_poly(Poly::constant(vars, c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Returns the polynomial if the denominator is a constant.
    pub fn as_poly(&self) -> Option<Poly> {
        if self.den.is_constant() {
            let c = self.den.constant_term();
            Some(self.num.scale(&c.inv()?))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        let vars = self.num.vars().clone();
        if self.num.is_zero() {
            self.den = Poly::one(&vars);
            return;
        }
        if self.den.is_constant() {
            if !self.den.constant_term().is_one() {
                let c = self.den.constant_term().inv().expect("nonzero constant");
                self.num = self.num.scale(&c);
                self.den = Poly::one(&vars);
            }
            return;
        }
        let mn = self.num.min_exponents();
        let md = self.den.min_exponents();
        let common: Vec<u32> = mn.iter().zip(md.iter()).map(|(a, b)| (*a).min(*b)).collect();
        if common.iter().any(|&c| c > 0) {
            self.num = self.num.div_monomial(&common).expect("common monomial divides");
            self.den = self.den.div_monomial(&common).expect("common monomial divides");
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            self.num = q;
            self.den = Poly::one(&vars);
            return;
        }
        let trailing = self
            .den
            .terms()
            .iter()
            .min_by(|a, b| total_degree(a.0).cmp(&total_degree(b.0)).then(a.0.cmp(b.0)))
            .map(|(_, c)| c.clone())
            .expect("nonzero denominator");
        if !trailing.is_one() {
            let inv = trailing.inv().expect("nonzero coefficient");
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn scale(&self, c: &GaussRat) -> RatFun {
        RatFun { num: self.num.scale(c), den: self.den.clone() }.renormalized_if_zero()
    }

    fn renormalized_if_zero(mut self) -> RatFun {
        if self.num.is_zero() {
            self.den = Poly::one(self.num.vars());
        }
        self
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFun {
        RatFun::new(&self.num * p, self.den.clone())
    }

    pub fn inv(&self) -> Option<RatFun> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFun::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn checked_div(&self, o: &RatFun) -> Option<RatFun> {
        Some(self * &o.inv()?)
    }

    pub fn conj(&self) -> RatFun {
        RatFun::new(self.num.conj(), self.den.conj())
    }

    /// Partial derivative by the quotient rule.
    pub fn derivative(&self, idx: usize) -> RatFun {
        if self.den.is_constant() {
            return RatFun { num: self.num.derivative(idx), den: self.den.clone() }.renormalized_if_zero();
        }
        let dn = self.num.derivative(idx);
        let dd = self.den.derivative(idx);
        if dd.is_zero() {
            return RatFun::new(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RatFun::new(num, &self.den * &self.den)
    }

    /// Value at a point, `None` if the denominator vanishes there.
    pub fn eval(&self, point: &[GaussRat]) -> Option<GaussRat> {
        let d = self.den.eval(point);
        let inv = d.inv()?;
        Some(&self.num.eval(point) * &inv)
    }

    pub fn value_at_origin(&self) -> Option<GaussRat> {
        let inv = self.den.constant_term().inv()?;
        Some(&self.num.constant_term() * &inv)
    }

    pub fn eval_f64(&self, point: &[f64]) -> (f64, f64) {
        let (nr, ni) = self.num.eval_f64(point);
        let (dr, di) = self.den.eval_f64(point);
        let m = dr * dr + di * di;
        ((nr * dr + ni * di) / m, (ni * dr - nr * di) / m)
    }

    pub fn remap(&self, target: &VarSet) -> Option<RatFun> {
        Some(RatFun::new(self.num.remap(target)?, self.den.remap(target)?))
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }
}

impl PartialEq for RatFun {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        &self.num * &o.den == &o.num * &self.den
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun({})", self)
    }
}

impl<'a> Add<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn add(self, o: &RatFun) -> RatFun {
        if self.den == o.den {
            return RatFun::new(&self.num + &o.num, self.den.clone());
        }
        if let Some(q) = o.den.div_exact(&self.den) {
            return RatFun::new(&(&self.num * &q) + &o.num, o.den.clone());
        }
        if let Some(q) = self.den.div_exact(&o.den) {
            return RatFun::new(&self.num + &(&o.num * &q), self.den.clone());
        }
        RatFun::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn sub(self, o: &RatFun) -> RatFun {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn mul(self, o: &RatFun) -> RatFun {
        if self.num.is_zero() || o.num.is_zero() {
            return RatFun::zero(self.vars());
        }
        if let Some(q) = o.num.div_exact(&self.den) {
            if let Some(q2) = self.num.div_exact(&o.den) {
                return RatFun::from_poly(&q * &q2);
            }
            return RatFun::new(&self.num * &q, o.den.clone());
        }
        if let Some(q) = self.num.div_exact(&o.den) {
            return RatFun::new(&q * &o.num, self.den.clone());
        }
        RatFun::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

impl Add for RatFun {
    type Output = RatFun;
    fn add(self, o: RatFun) -> RatFun {
        &self + &o
    }
}

impl Sub for RatFun {
    type Output = RatFun;
    fn sub(self, o: RatFun) -> RatFun {
        &self - &o
    }
}

impl Mul for RatFun {
    type Output = RatFun;
    fn mul(self, o: RatFun) -> RatFun {
        &self * &o
    }
}

impl From<Poly> for RatFun {
    fn from(p: Poly) -> Self {
        RatFun::from_poly(p)
    }
}
