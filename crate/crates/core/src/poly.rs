//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padics::{reduce_mod_p, Prime};
use crate::rational::{binomial, Q};
use crate::scalar::Coeff;
use crate::series::{LaurentSeries, TruncatedSeries};

/// Coefficients lowest degree first; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&n| Q::from_integer(BigInt::from(n))).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `c x^k`.
    pub fn monomial(k: usize, c: Q) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn x() -> Self {
        Poly::monomial(1, Q::one())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Q) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    /// Division with remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        let lead_inv = d.leading().recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Q::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    r[k + i] = &r[k + i] - &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// `self / d` when the division is exact.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor, by a primitive remainder sequence over
    /// Z after a modular check for coprimality.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        let (a, b) = (self.primitive_part(), other.primitive_part());
        if coprime_mod_prime(&a, &b) {
            return Poly::one();
        }
        let (mut a, mut b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        while !b.is_empty() {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = primitive(r);
        }
        Poly::new(a.into_iter().map(Q::from_integer).collect()).monic()
    }

    /// Integer coefficients with content 1 and positive leading term.
    fn primitive_part(&self) -> Vec<BigInt> {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        primitive(self.coeffs.iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect())
    }

    /// Largest `e` such that some root of `f` is a root of `self` of
    /// multiplicity `e` (for squarefree `f`).
    pub fn max_root_multiplicity_in(&self, f: &Poly) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let mut cur = self.clone();
        let mut h = cur.gcd(f);
        let mut e = 0;
        while !h.is_constant() {
            e += 1;
            cur = cur.exact_div(&h).expect("gcd divides");
            h = cur.gcd(&h);
        }
        e
    }

    /// `self(x + c)`.
    pub fn taylor_shift(&self, c: &Q) -> Poly {
        let n = self.coeffs.len();
        let mut out = vec![Q::zero(); n];
        for (k, a) in self.coeffs.iter().enumerate() {
            // a (x + c)^k
            let mut cpow = Q::one();
            for i in (0..=k).rev() {
                out[i] = &out[i] + a * Q::from_integer(binomial(k as u64, i as u64)) * &cpow;
                cpow = cpow * c;
            }
        }
        Poly::new(out)
    }

    /// `x^n self(1/x)` for `n >= deg`.
    pub fn reversed(&self, n: usize) -> Poly {
        let mut v = vec![Q::zero(); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[n - k] = c.clone();
        }
        Poly::new(v)
    }

    /// Coefficients mod p, or `None` if some coefficient is not p-integral.
    pub fn reduce(&self, p: Prime) -> Option<Vec<u64>> {
        self.coeffs.iter().map(|c| reduce_mod_p(c, p)).collect()
    }

    /// True if every coefficient is p-integral.
    pub fn is_integral_at(&self, p: Prime) -> bool {
        self.reduce(p).is_some()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Composes with a power series.
    pub fn eval_series<K: Coeff>(&self, s: &TruncatedSeries<K>) -> TruncatedSeries<K> {
        let t = s.precision();
        let mut acc = TruncatedSeries::zero(t);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * s) + &TruncatedSeries::constant(K::from_rational(c.clone()), t);
        }
        acc
    }

    /// Evaluation at a power series `c + u` with rational `c`: expands
    /// around `c` and drops the powers of `u` that vanish to the known
    /// precision.
    fn eval_centered<K: Coeff>(&self, s: &LaurentSeries<K>) -> Option<LaurentSeries<K>> {
        if s.shift < 0 || self.is_constant() {
            return None;
        }
        let t = usize::try_from(s.abs_precision()).ok().filter(|&t| t > 0)?;
        let ser = s.to_series(t).ok()?;
        let c = ser.coeffs().first().map_or(Some(Q::zero()), |c| c.to_rational())?;
        let u = &ser - &TruncatedSeries::constant(K::from_rational(c.clone()), t);
        let shifted = if c.is_zero() { self.clone() } else { self.taylor_shift(&c) };
        let cap = match u.order() {
            None => 1,
            Some(v) => t.div_ceil(v),
        };
        let mut acc = TruncatedSeries::zero(t);
        for coef in shifted.coeffs.iter().take(cap).rev() {
            acc = &(&acc * &u) + &TruncatedSeries::constant(K::from_rational(coef.clone()), t);
        }
        Some(LaurentSeries::from_series(acc))
    }

    /// Composes with a Laurent series.
    pub fn eval_laurent<K: Coeff>(&self, s: &LaurentSeries<K>) -> LaurentSeries<K> {
        if let Some(r) = self.eval_centered(s) {
            return r;
        }
        let exact = |c: &Q, prec: i64| LaurentSeries::constant(K::from_rational(c.clone()), prec.max(1) as usize);
        let mut acc: Option<LaurentSeries<K>> = None;
        for c in self.coeffs.iter().rev() {
            acc = Some(match acc {
                None => exact(c, s.abs_precision().max(s.series.precision() as i64)),
                Some(a) => {
                    let prod = a.mul(s);
                    let prec = prod.abs_precision();
                    prod.add(&exact(c, prec))
                }
            });
        }
        acc.unwrap_or_else(|| exact(&Q::zero(), s.abs_precision().max(s.series.precision() as i64)))
    }
}

/// Evaluates a polynomial with F_p coefficients.
pub fn eval_mod_p(c: &[u64], x: u64, p: u64) -> u64 {
    c.iter().rev().fold(0u64, |acc, &a| (acc * x + a) % p)
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let Some(last) = v.last() else {
        return v;
    };
    let mut content = v.iter().fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
    if last.is_negative() {
        content = -content;
    }
    if !content.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &content;
        }
    }
    v
}

/// Remainder of `lc(b)^k a` by `b` for a suitable `k`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let lr = r.last().expect("nonempty").clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &lr * bc;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// True when the reductions modulo a large prime not dividing either
/// leading coefficient are coprime (which implies coprimality over Q).
fn coprime_mod_prime(a: &[BigInt], b: &[BigInt]) -> bool {
    const PRIMES: [u64; 3] = [2305843009213693951, 4611686018427387847, 9223372036854775783];
    let Some(m) = PRIMES.iter().copied().find(|&m| {
        let mb = BigInt::from(m);
        !(a.last().expect("nonzero") % &mb).is_zero() && !(b.last().expect("nonzero") % &mb).is_zero()
    }) else {
        return false;
    };
    let red = |v: &[BigInt]| -> Vec<u64> {
        let mb = BigInt::from(m);
        v.iter().map(|c| num_integer::Integer::mod_floor(c, &mb).try_into().expect("reduced")).collect()
    };
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % m as u128) as u64;
    let powm = |mut x: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, x);
            }
            x = mulm(x, x);
            e >>= 1;
        }
        acc
    };
    let (mut x, mut y) = (red(a), red(b));
    while !y.is_empty() {
        // x mod y
        let inv = powm(*y.last().expect("nonempty"), m - 2);
        while x.len() >= y.len() {
            let k = x.len() - y.len();
            let c = mulm(*x.last().expect("nonempty"), inv);
            for (i, yc) in y.iter().enumerate() {
                x[k + i] = (x[k + i] + m - mulm(c, *yc)) % m;
            }
            while x.last() == Some(&0) {
                x.pop();
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len() == 1
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = if a.is_one() && k > 0 { String::new() } else if k > 0 { format!("{a}*") } else { format!("{a}") };
            match k {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Resultant of two polynomials via the Sylvester matrix.
pub fn resultant(a: &Poly, b: &Poly) -> Result<Q> {
    let (m, n) = match (a.degree(), b.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return Err(Error::Domain("resultant of the zero polynomial".into())),
    };
    let size = m + n;
    if size == 0 {
        return Ok(Q::one());
    }
    let mut mat = vec![vec![Q::zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.coeffs.iter().rev().enumerate() {
            mat[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in b.coeffs.iter().rev().enumerate() {
            mat[n + i][i + k] = c.clone();
        }
    }
    Ok(crate::linalg::det_bareiss(mat))
}

/// Discriminant of a polynomial, `(-1)^(n(n-1)/2) res(f, f') / lc(f)`.
pub fn discriminant(f: &Poly) -> Result<Q> {
    let n = f.degree().ok_or_else(|| Error::Domain("discriminant of zero".into()))?;
    let r = resultant(f, &f.derivative())?;
    let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 0 { Q::one() } else { -Q::one() };
    Ok(sign * r / f.leading())
}
