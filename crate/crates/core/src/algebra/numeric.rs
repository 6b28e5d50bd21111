//! Floating-point evaluation of exact polynomials.

use num_complex::Complex64;

use super::Poly;

/// A polynomial with coefficients rounded to `Complex64`, for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct NumPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumPoly {
    pub fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|(e, c)| {
                let (re, im) = c.to_f64_pair();
                (e.clone(), Complex64::new(re, im))
            })
            .collect();
        NumPoly { nvars: p.nvars(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[f64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= x.powi(k as i32);
                }
            }
            acc += c * m;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GaussRat, VarSet};

    #[test]
    fn matches_exact_evaluation() {
        let v = VarSet::new(&["x", "t"]);
        let x = Poly::var(&v, 0);
        let t = Poly::var(&v, 1);
        let p = &(&x.pow(2) * &t).scale(&GaussRat::complex(1, -2)) + &Poly::constant(&v, GaussRat::from_frac(1, 3));
        let z = NumPoly::new(&p).eval(&[0.5, -2.0]);
        assert!((z.re - (-0.5 + 1.0 / 3.0)).abs() < 1e-12);
        assert!((z.im - 1.0).abs() < 1e-12);
    }
}
