//! Determinants over commutative rings and row reduction over F_p.

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Q;
use crate::scalar::Coeff;
use crate::series::TruncatedSeries;

/// Minimal commutative-ring interface used by the determinant routines.
/// `zero_like`/`one_like` exist because series carry a precision.
pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, o: &Self) -> Self;
    fn sub_elem(&self, o: &Self) -> Self;
    fn mul_elem(&self, o: &Self) -> Self;
    fn neg_elem(&self) -> Self {
        self.zero_like().sub_elem(self)
    }
}

/// Rings where `a / b` can be computed whenever `b` divides `a`.
pub trait ExactDivision: RingElem {
    fn exact_div_elem(&self, d: &Self) -> Option<Self>;
}

impl RingElem for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
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
}

impl ExactDivision for Q {
    fn exact_div_elem(&self, d: &Self) -> Option<Self> {
        (!d.is_zero()).then(|| self / d)
    }
}

impl RingElem for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero()
    }
    fn one_like(&self) -> Self {
        Poly::one()
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
}

impl ExactDivision for Poly {
    fn exact_div_elem(&self, d: &Self) -> Option<Self> {
        self.exact_div(d)
    }
}

impl<K: Coeff> RingElem for TruncatedSeries<K> {
    fn zero_like(&self) -> Self {
        TruncatedSeries::zero(self.precision())
    }
    fn one_like(&self) -> Self {
        TruncatedSeries::one(self.precision())
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
}

/// Fraction-free Bareiss elimination with row pivoting.
pub fn det_bareiss<R: ExactDivision>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        panic!("determinant of an empty matrix has no ring context");
    }
    let mut sign_neg = false;
    let mut prev = m[0][0].one_like();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero_elem() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero_elem()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_neg = !sign_neg;
                }
                None => return m[0][0].zero_like(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul_elem(&m[k][k]).sub_elem(&m[i][k].mul_elem(&m[k][j]));
                m[i][j] = num.exact_div_elem(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_neg {
        d.neg_elem()
    } else {
        d
    }
}

/// Division-free determinant: dynamic programming over column subsets
/// (Laplace expansion along rows). Cost `O(2^n n)` ring multiplications,
/// fine for the small matrices that occur here.
pub fn det_expand<R: RingElem>(m: &[Vec<R>]) -> R {
    let n = m.len();
    assert!(n > 0 && n <= 20, "unsupported determinant size {n}");
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let zero = m[0][0].zero_like();
    let mut dp: Vec<Option<R>> = vec![None; 1 << n];
    dp[0] = Some(m[0][0].one_like());
    for row in m {
        let mut next: Vec<Option<R>> = vec![None; 1 << n];
        for (mask, val) in dp.iter().enumerate() {
            let Some(val) = val else { continue };
            if val.is_zero_elem() {
                continue;
            }
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero_elem() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let mut term = val.mul_elem(entry);
                if above % 2 == 1 {
                    term = term.neg_elem();
                }
                let slot = &mut next[mask | (1 << c)];
                *slot = Some(match slot.take() {
                    Some(s) => s.add_elem(&term),
                    None => term,
                });
            }
        }
        dp = next;
    }
    dp[(1 << n) - 1].take().unwrap_or(zero)
}

/// Pivot columns of the row echelon form of a matrix over F_p, scanning
/// columns left to right.
pub fn pivot_columns_mod_p(rows: &[Vec<u64>], p: u64) -> Vec<usize> {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in &mut m {
        r.resize(ncols, 0);
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == m.len() {
            break;
        }
        let Some(r) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, r);
        let inv = inverse_mod_p(m[rank][c], p);
        for j in c..ncols {
            m[rank][j] = m[rank][j] * inv % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let factor = m[i][c];
                for j in c..ncols {
                    m[i][j] = (m[i][j] + p * p - factor * m[rank][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub fn inverse_mod_p(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn qm(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn determinants_agree() {
        let cases: Vec<Vec<Vec<Q>>> = vec![
            qm(&[&[2, 1], &[1, 3]]),
            qm(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]]),
            qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]),
            qm(&[&[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 1, 0, 0]]),
        ];
        let expect = [q(5), q(-3), q(0), q(-1)];
        for (m, e) in cases.into_iter().zip(expect) {
            assert_eq!(det_expand(&m), e);
            assert_eq!(det_bareiss(m), e);
        }
    }

    #[test]
    fn polynomial_determinant() {
        let x = Poly::x();
        let m = vec![vec![x.clone(), Poly::one()], vec![Poly::one(), x.clone()]];
        assert_eq!(det_bareiss(m.clone()), Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(det_expand(&m), Poly::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn pivots() {
        assert_eq!(pivot_columns_mod_p(&[vec![1, 0, 0], vec![0, 1, 0]], 5), vec![0, 1]);
        assert_eq!(pivot_columns_mod_p(&[vec![0, 5, 1], vec![0, 0, 2]], 5), vec![2]);
        assert_eq!(pivot_columns_mod_p(&[vec![1, 2], vec![2, 4]], 7), vec![0]);
    }
}
