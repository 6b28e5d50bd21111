//! Sparse multivariate polynomials over ℚ(i) with an explicit variable list.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::gauss::GaussRat;

/// An ordered list of variable names shared by every polynomial of one computation.
#[derive(Clone, Eq)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        VarSet(names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Returns a new set with `extra` appended.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> VarSet {
        let mut v: Vec<String> = self.0.to_vec();
        v.extend(extra.iter().map(|s| s.as_ref().to_string()));
        VarSet(v.into())
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// Exponent multi-index; its length equals the number of variables.
pub type Exps = Vec<u32>;

pub fn total_degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    vars: VarSet,
    terms: BTreeMap<Exps, GaussRat>,
}

impl Poly {
    pub fn zero(vars: &VarSet) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarSet, c: GaussRat) -> Self {
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        Poly::constant(vars, GaussRat::one())
    }

    pub fn var(vars: &VarSet, idx: usize) -> Self {
        Poly::monomial(vars, unit_exps(vars.len(), idx), GaussRat::one())
    }

    pub fn var_named(vars: &VarSet, name: &str) -> Option<Self> {
        vars.index_of(name).map(|i| Poly::var(vars, i))
    }

    pub fn monomial(vars: &VarSet, exps: Exps, c: GaussRat) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent length must match variable count");
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Exps, GaussRat)>>(vars: &VarSet, it: I) -> Self {
        let mut p = Poly::zero(vars);
        for (e, c) in it {
            p.add_term(e, &c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Exps, GaussRat> {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> GaussRat {
        self.terms.get(e).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn constant_term(&self) -> GaussRat {
        self.coeff(&vec![0; self.nvars()])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| total_degree(e)).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Exps, c: &GaussRat) {
        debug_assert_eq!(e.len(), self.nvars());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Poly) {
        assert!(self.vars == other.vars, "variable sets differ: {:?} vs {:?}", self.vars, other.vars);
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn conj(&self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect(),
        }
    }

    /// Real part, coefficientwise (variables are real).
    pub fn re(&self) -> Poly {
        Poly::from_terms(&self.vars, self.terms.iter().map(|(e, c)| (e.clone(), GaussRat::real(c.re.clone()))))
    }

    /// Imaginary part, coefficientwise.
    pub fn im(&self) -> Poly {
        Poly::from_terms(&self.vars, self.terms.iter().map(|(e, c)| (e.clone(), GaussRat::real(c.im.clone()))))
    }

    pub fn mul_i(&self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.mul_i())).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative in variable `idx`.
    pub fn derivative(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            out.terms.insert(ne, c.scale_int(k as i64));
        }
        out
    }

    pub fn eval(&self, point: &[GaussRat]) -> GaussRat {
        assert_eq!(point.len(), self.nvars());
        let mut acc = GaussRat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e.iter()) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Floating point evaluation at a real point, returning `(re, im)`.
    pub fn eval_f64(&self, point: &[f64]) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for (x, &k) in point.iter().zip(e.iter()) {
                if k > 0 {
                    m *= x.powi(k as i32);
                }
            }
            let (cr, ci) = c.to_f64_pair();
            re += cr * m;
            im += ci * m;
        }
        (re, im)
    }

    /// Drops all terms of total degree above `order`.
    pub fn truncate(&self, order: u32) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) <= order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Componentwise minimum exponent over the support (all zeros for the zero polynomial).
    pub fn min_exponents(&self) -> Exps {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars()];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e.iter()) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// Divides by the monomial `x^alpha`; returns `None` if some term is not divisible.
    pub fn div_monomial(&self, alpha: &[u32]) -> Option<Poly> {
        let mut out = Poly::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            for (a, b) in ne.iter_mut().zip(alpha.iter()) {
                if *a < *b {
                    return None;
                }
                *a -= *b;
            }
            out.terms.insert(ne, c.clone());
        }
        Some(out)
    }

    pub fn mul_monomial(&self, alpha: &[u32]) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(alpha.iter()).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Leading term under lexicographic order on exponents.
    fn leading(&self) -> Option<(&Exps, &GaussRat)> {
        self.terms.iter().next_back()
    }

    /// Exact division: returns `q` with `self = q * g`, or `None` when `g` does not divide `self`.
    ///
    /// A single polynomial is a Gröbner basis of the ideal it generates, so the
    /// division algorithm leaves a zero remainder exactly when `g | self`.
    pub fn div_exact(&self, g: &Poly) -> Option<Poly> {
        self.check_vars(g);
        let (lg_e, lg_c) = g.leading()?;
        let lg_e = lg_e.clone();
        let lg_inv = lg_c.inv()?;
        let mut r = self.clone();
        let mut q = Poly::zero(&self.vars);
        while let Some((le, lc)) = r.leading() {
            let mut qe = le.clone();
            for (a, b) in qe.iter_mut().zip(lg_e.iter()) {
                if *a < *b {
                    return None;
                }
                *a -= *b;
            }
            let qc = lc * &lg_inv;
            let step = g.mul_monomial(&qe).scale(&qc);
            q.add_term(qe, &qc);
            r = &r - &step;
        }
        Some(q)
    }

    /// Rewrites the polynomial over another variable set, matching variables by name.
    /// Fails if a variable that actually occurs is missing from `target`.
    pub fn remap(&self, target: &VarSet) -> Option<Poly> {
        let map: Vec<Option<usize>> = self.vars.names().iter().map(|n| target.index_of(n)).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                ne[map[i]?] += k;
            }
            out.add_term(ne, c);
        }
        Some(out)
    }

    /// Substitutes `x_i -> images[i]` for every variable; images share a common variable set.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars());
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_else(|| self.vars.clone());
        let mut out = Poly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(&target, c.clone());
            for (img, &k) in images.iter().zip(e.iter()) {
                if k > 0 {
                    t = &t * &img.pow(k);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Translates the polynomial: returns `q(x) = p(x + shift)`.
    pub fn translate(&self, shift: &[GaussRat]) -> Poly {
        let images: Vec<Poly> = (0..self.nvars())
            .map(|i| &Poly::var(&self.vars, i) + &Poly::constant(&self.vars, shift[i].clone()))
            .collect();
        self.substitute(&images)
    }

    /// Terms sorted for display: descending total degree, then descending lex.
    pub fn sorted_terms(&self) -> Vec<(&Exps, &GaussRat)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| total_degree(b.0).cmp(&total_degree(a.0)).then(b.0.cmp(a.0)));
        v
    }

    fn monomial_string(&self, e: &[u32]) -> String {
        let mut parts = Vec::new();
        for (name, &k) in self.vars.names().iter().zip(e.iter()) {
            match k {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{}^{}", name, k)),
            }
        }
        parts.join("*")
    }
}

pub(crate) fn unit_exps(n: usize, idx: usize) -> Exps {
    let mut e = vec![0; n];
    e[idx] = 1;
    e
}

impl fmt::Display for Poly {
    /// Infix form readable by the structure-file parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms() {
            let mono = self.monomial_string(e);
            let (negative, body) = if c.is_real() {
                let mag = GaussRat::real(c.re.abs());
                let body = if mono.is_empty() {
                    mag.to_string()
                } else if mag.is_one() {
                    mono.clone()
                } else {
                    format!("{}*{}", mag, mono)
                };
                (c.re.is_negative(), body)
            } else if c.re.is_zero() {
                let neg = c.im.is_negative();
                let mag = GaussRat::new(Zero::zero(), c.im.abs());
                let body = if mono.is_empty() { mag.to_string() } else { format!("{}*{}", mag, mono) };
                (neg, body)
            } else {
                let body = if mono.is_empty() { c.to_string() } else { format!("{}*{}", c, mono) };
                (false, body)
            };
            if first {
                if negative {
                    write!(f, "-")?;
                }
                write!(f, "{}", body)?;
                first = false;
            } else {
                write!(f, " {} {}", if negative { "-" } else { "+" }, body)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        self.check_vars(o);
        let (big, small) = if self.nterms() >= o.nterms() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self.check_vars(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.check_vars(o);
        let mut out = Poly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exps = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
