//! Exact linear algebra over ℚ(i), polynomial and rational-function matrices.

use super::gauss::GaussRat;
use super::poly::Poly;
use super::ratfun::RatFun;
use crate::Error;

/// Rank over ℂ by Gaussian elimination on exact scalars.
pub fn exact_rank(rows: &[Vec<GaussRat>]) -> usize {
    echelon(rows).len()
}

/// Reduced echelon rows spanning the row space of `rows` (zero rows dropped).
pub fn echelon(rows: &[Vec<GaussRat>]) -> Vec<Vec<GaussRat>> {
    let mut m: Vec<Vec<GaussRat>> = rows.to_vec();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| col < m[r].len() && !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][col].inv().expect("nonzero pivot");
        let prow: Vec<GaussRat> = m[rank].iter().map(|x| x * &inv).collect();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || col >= row.len() || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(prow.iter()) {
                *x -= &(&f * p);
            }
        }
        m[rank] = prow;
        rank += 1;
    }
    m.truncate(rank);
    m
}

/// A Hermitian matrix over ℚ(i).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    entries: Vec<Vec<GaussRat>>,
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl HermitianMatrix {
    pub fn new(entries: Vec<Vec<GaussRat>>) -> Result<Self, Error> {
        let n = entries.len();
        for (j, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotHermitian);
            }
            for k in 0..n {
                if row[k] != entries[k][j].conj() {
                    return Err(Error::NotHermitian);
                }
            }
        }
        Ok(HermitianMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, j: usize, k: usize) -> &GaussRat {
        &self.entries[j][k]
    }

    pub fn entries(&self) -> &[Vec<GaussRat>] {
        &self.entries
    }
}

/// Exact inertia by symmetric (congruence) elimination.
pub fn hermitian_inertia(h: &HermitianMatrix) -> Inertia {
    let mut m = h.entries.clone();
    let mut pos = 0;
    let mut neg = 0;
    loop {
        let n = m.len();
        if n == 0 {
            break;
        }
        let diag = (0..n).find(|&k| !m[k][k].is_zero());
        let k = match diag {
            Some(k) => k,
            None => {
                let Some((j, k)) = (0..n)
                    .flat_map(|j| (0..n).map(move |k| (j, k)))
                    .find(|&(j, k)| !m[j][k].is_zero())
                else {
                    break;
                };
                // Congruence by P = I + c e_k e_jᵀ puts 2|m_jk|² on the diagonal.
                let c = m[j][k].conj();
                let cc = c.conj();
                for row in m.iter_mut() {
                    let add = &c * &row[k];
                    row[j] += &add;
                }
                let rk = m[k].clone();
                for (x, y) in m[j].iter_mut().zip(rk.iter()) {
                    *x += &(&cc * y);
                }
                j
            }
        };
        let p = m[k][k].clone();
        if p.re > num_traits::Zero::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        let pinv = p.inv().expect("nonzero pivot");
        let idx: Vec<usize> = (0..n).filter(|&a| a != k).collect();
        let next: Vec<Vec<GaussRat>> = idx
            .iter()
            .map(|&a| {
                idx.iter()
                    .map(|&b| &m[a][b] - &(&(&m[a][k] * &m[k][b]) * &pinv))
                    .collect()
            })
            .collect();
        m = next;
    }
    let zero = h.dim() - pos - neg;
    Inertia { pos, neg, zero }
}

/// Minimal ring interface shared by `Poly` and `RatFun` for determinant code.
pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, o: &Self) -> Self;
    fn sub_elem(&self, o: &Self) -> Self;
    fn mul_elem(&self, o: &Self) -> Self;
    fn neg_elem(&self) -> Self;
}

impl RingElem for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        Poly::one(self.vars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_elem(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_elem(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_elem(&self) -> Self {
        -self
    }
}

impl RingElem for RatFun {
    fn zero_like(&self) -> Self {
        RatFun::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        RatFun::one(self.vars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_elem(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_elem(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_elem(&self) -> Self {
        -self
    }
}

/// Determinant by Laplace expansion along the first row (small sizes only).
pub fn det<T: RingElem>(m: &[Vec<T>]) -> T {
    let n = m.len();
    assert!(n > 0, "determinant of empty matrix needs a ring context");
    if n == 1 {
        return m[0][0].clone();
    }
    if n == 2 {
        return m[0][0].mul_elem(&m[1][1]).sub_elem(&m[0][1].mul_elem(&m[1][0]));
    }
    let mut acc = m[0][0].zero_like();
    for c in 0..n {
        if m[0][c].is_zero_elem() {
            continue;
        }
        let term = m[0][c].mul_elem(&det(&minor_matrix(m, 0, c)));
        acc = if c % 2 == 0 { acc.add_elem(&term) } else { acc.sub_elem(&term) };
    }
    acc
}

/// The matrix with row `r` and column `c` removed.
pub fn minor_matrix<T: Clone>(m: &[Vec<T>], r: usize, c: usize) -> Vec<Vec<T>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Submatrix on the given rows and columns.
pub fn submatrix<T: Clone>(m: &[Vec<T>], rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
    rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect()
}

/// Classical adjoint: `adj(M)·M = M·adj(M) = det(M)·I`.
pub fn adjugate<T: RingElem>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![m[0][0].one_like()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = det(&minor_matrix(m, j, i));
                    if (i + j) % 2 == 0 { c } else { c.neg_elem() }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul<T: RingElem>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let inner = b.len();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc = row[0].zero_like();
                    for k in 0..inner {
                        if row[k].is_zero_elem() || b[k][j].is_zero_elem() {
                            continue;
                        }
                        acc = acc.add_elem(&row[k].mul_elem(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn identity_like<T: RingElem>(proto: &T, n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { proto.one_like() } else { proto.zero_like() }).collect())
        .collect()
}

/// Inverse of a rational-function matrix, `None` when singular.
pub fn rat_inverse(m: &[Vec<RatFun>]) -> Option<Vec<Vec<RatFun>>> {
    let d = det(m);
    let dinv = d.inv()?;
    Some(adjugate(m).iter().map(|row| row.iter().map(|x| x * &dinv).collect()).collect())
}

/// Solves `A x = rhs` over the field of rational functions.
///
/// Returns one solution (free unknowns set to zero), or `None` if inconsistent.
pub fn rat_solve(a: &[Vec<RatFun>], rhs: &[RatFun]) -> Option<Vec<RatFun>> {
    let m = a.len();
    assert_eq!(rhs.len(), m);
    if m == 0 {
        return Some(Vec::new());
    }
    let n = a[0].len();
    let mut aug: Vec<Vec<RatFun>> = a
        .iter()
        .zip(rhs.iter())
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].inv().expect("nonzero pivot");
        let prow: Vec<RatFun> = aug[rank].iter().map(|x| x * &inv).collect();
        for r in 0..m {
            if r == rank || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].clone();
            for c in col..=n {
                if prow[c].is_zero() {
                    continue;
                }
                aug[r][c] = &aug[r][c] - &(&f * &prow[c]);
            }
        }
        aug[rank] = prow;
        pivots.push(col);
        rank += 1;
    }
    if aug[rank..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let proto = &rhs[0];
    let mut x = vec![proto.zero_like(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// Rank over the field of rational functions.
pub fn rat_rank(rows: &[Vec<RatFun>]) -> usize {
    let mut m: Vec<Vec<RatFun>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].inv().expect("nonzero pivot");
        let prow: Vec<RatFun> = m[rank].iter().map(|x| x * &inv).collect();
        for r in (rank + 1)..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..ncols {
                if !prow[c].is_zero() {
                    m[r][c] = &m[r][c] - &(&f * &prow[c]);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::VarSet;

    fn g(re: i64, im: i64) -> GaussRat {
        GaussRat::complex(re, im)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank(&[vec![g(0, 0); 3], vec![g(0, 0); 3]]), 0);
        let m = vec![vec![g(1, 0), g(0, 0)], vec![g(0, 0), g(1, 0)], vec![g(1, 0), g(1, 0)]];
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn inertia_examples() {
        let id = HermitianMatrix::new((0..3).map(|i| (0..3).map(|j| g((i == j) as i64, 0)).collect()).collect()).unwrap();
        assert_eq!(hermitian_inertia(&id), Inertia { pos: 3, neg: 0, zero: 0 });
        let d = HermitianMatrix::new(vec![vec![g(1, 0), g(0, 0)], vec![g(0, 0), g(-1, 0)]]).unwrap();
        assert_eq!(hermitian_inertia(&d), Inertia { pos: 1, neg: 1, zero: 0 });
        let off = HermitianMatrix::new(vec![vec![g(0, 0), g(0, 1)], vec![g(0, -1), g(0, 0)]]).unwrap();
        assert_eq!(hermitian_inertia(&off), Inertia { pos: 1, neg: 1, zero: 0 });
        assert!(HermitianMatrix::new(vec![vec![g(0, 0), g(0, 1)], vec![g(0, 1), g(0, 0)]]).is_err());
    }

    #[test]
    fn adjugate_identity() {
        let v = VarSet::new(&["t"]);
        let t = Poly::var(&v, 0);
        let one = Poly::one(&v);
        let m = vec![vec![one.clone(), t.clone()], vec![t.pow(2), &one + &t]];
        let prod = mat_mul(&adjugate(&m), &m);
        let dm = det(&m);
        assert_eq!(prod[0][0], dm);
        assert!(prod[0][1].is_zero());
        assert_eq!(prod[1][1], dm);
    }

    #[test]
    fn combos_lex() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }
}
