//! Exact p-adic valuations of rationals, Legendre's formula, and certified
//! evaluation of the constant `kappa_p = 1 + (p-1)/(p-2) / ln p`.
//!
//! Logarithms are computed as rational intervals (argument reduction by powers
//! of two, then the `atanh` series with an explicit tail bound), so every
//! quantity that feeds a bound is a certified rational, never a float.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{round_down_dyadic, round_up_dyadic, Q};

/// Working precision (in bits) of the logarithm intervals.
const LOG_BITS: u32 = 128;
/// Output grid of rounded constants such as `kappa`.
const OUTPUT_BITS: u32 = 64;

/// An odd prime `p >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A p-adic valuation; `Infinite` is the valuation of zero and compares
/// greater than every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = p.to_bigint();
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Exact p-adic valuation of a rational; zero maps to `Valuation::Infinite`.
pub fn valuation(r: &Q, p: Prime) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(r.numer(), p) - int_valuation(r.denom(), p))
}

/// Reduction of a p-integral rational to `F_p`; `None` if `p` divides the
/// denominator.
pub fn reduce_mod_p(r: &Q, p: Prime) -> Option<u64> {
    let pb = p.to_bigint();
    let den = r.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let num = r.numer().mod_floor(&pb);
    let inv = mod_inverse(&den, &pb)?;
    (num * inv).mod_floor(&pb).to_u64()
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Image of a p-integral rational in `Z/p^k`.
pub fn reduce_mod_pk(r: &Q, p: Prime, k: u32) -> Option<BigInt> {
    let m = p.to_bigint().pow(k);
    let inv = mod_inverse(r.denom(), &m)?;
    Some((r.numer() * inv).mod_floor(&m))
}

/// Hensel lift of a square root: the unique `s mod p^k` with `s^2 = d` and
/// `s = residue (mod p)`. Requires `d` a p-adic unit whose reduction is the
/// square of `residue != 0`.
pub fn sqrt_mod_pk(d: &Q, p: Prime, residue: u64, k: u32) -> Result<BigInt> {
    let pb = p.to_bigint();
    let dbar = reduce_mod_p(d, p)
        .ok_or_else(|| Error::Domain("radicand is not p-integral".into()))?;
    let r0 = BigInt::from(residue % p.get());
    if r0.is_zero() || (&r0 * &r0 - BigInt::from(dbar)).mod_floor(&pb) != BigInt::zero() {
        return Err(Error::Domain(format!(
            "{residue} is not a nonzero square root of the radicand mod {p}"
        )));
    }
    let mut s = r0;
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let m = pb.pow(prec);
        let dm = reduce_mod_pk(d, p, prec).expect("unit radicand");
        let two_s_inv = mod_inverse(&(BigInt::from(2) * &s), &m).expect("2s is a unit");
        s = (&s - (&s * &s - dm) * two_s_inv).mod_floor(&m);
    }
    Ok(s.mod_floor(&pb.pow(k.max(1))))
}

/// Base-p digit sum.
pub fn digit_sum(mut n: u64, p: Prime) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p.get();
        n /= p.get();
    }
    s
}

/// Legendre's formula: `v_p(n!) = (n - s_p(n)) / (p - 1)`.
pub fn factorial_valuation(n: u64, p: Prime) -> u64 {
    (n - digit_sum(n, p)) / (p.get() - 1)
}

/// A closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Q) -> bool {
        &self.lo <= r && r <= &self.hi
    }
}

/// `2 atanh(u) = ln((1+u)/(1-u))` for `0 <= u <= 1/3`, as an interval of
/// width at most `2^-bits` (before outward rounding).
fn two_atanh(u: &Q, bits: u32) -> Interval {
    if u.is_zero() {
        return Interval { lo: Q::zero(), hi: Q::zero() };
    }
    let eps = Q::new(BigInt::one(), BigInt::one() << (bits + 2));
    let u2 = u * u;
    let mut power = u.clone();
    let mut sum = Q::zero();
    let mut k: u64 = 0;
    loop {
        let denom = Q::from_integer(BigInt::from(2 * k + 1));
        sum += &power / &denom;
        power = &power * &u2;
        k += 1;
        // tail of sum_{n>=k} u^{2n+1}/(2n+1) is at most u^{2k+1}/((2k+1)(1-u^2))
        let tail = &power / (Q::from_integer(BigInt::from(2 * k + 1)) * (Q::one() - &u2));
        if tail < eps {
            let two = Q::from_integer(BigInt::from(2));
            return Interval {
                lo: round_down_dyadic(&(&two * &sum), bits),
                hi: round_up_dyadic(&(two * (sum + tail)), bits),
            };
        }
    }
}

/// Certified enclosure of `ln x` for rational `x >= 1`.
pub fn ln_interval(x: &Q, bits: u32) -> Result<Interval> {
    if x < &Q::one() {
        return Err(Error::Domain(format!("ln_interval expects x >= 1, got {x}")));
    }
    // 2^k <= x < 2^(k+1)
    let mut k: u32 = (x.numer().bits() as i64 - x.denom().bits() as i64).max(0) as u32;
    while Q::from_integer(BigInt::one() << k) > *x {
        k -= 1;
    }
    while Q::from_integer(BigInt::one() << (k + 1)) <= *x {
        k += 1;
    }
    let y = x / Q::from_integer(BigInt::one() << k);
    let u = (&y - Q::one()) / (&y + Q::one());
    let tail = two_atanh(&u, bits + 8);
    let ln2 = two_atanh(&Q::new(BigInt::one(), BigInt::from(3)), bits + 8 + 32);
    let kq = Q::from_integer(BigInt::from(k));
    Ok(Interval {
        lo: round_down_dyadic(&(&kq * &ln2.lo + &tail.lo), bits),
        hi: round_up_dyadic(&(&kq * &ln2.hi + &tail.hi), bits),
    })
}

/// Certified rational upper bound for `log_p(n1) + (n2 - n1)/(p - 1)`, the
/// right-hand side of the factorial-ratio inequality
/// `v(n2!/n1!) <= log_p(n1) + (n2 - n1)/(p - 1)`.
pub fn factorial_ratio_bound(n1: u64, n2: u64, p: Prime) -> Result<Q> {
    if n1 == 0 {
        return Err(Error::Domain("factorial_ratio_bound needs n1 >= 1 (log_p(0) is undefined)".into()));
    }
    if n2 < n1 {
        return Err(Error::Domain(format!("factorial_ratio_bound needs n1 <= n2, got {n1} > {n2}")));
    }
    let linear = Q::new(BigInt::from(n2 - n1), BigInt::from(p.get() - 1));
    if n1 == 1 {
        return Ok(linear);
    }
    let ln_n1 = ln_interval(&Q::from_integer(BigInt::from(n1)), LOG_BITS)?;
    let ln_p = ln_interval(&Q::from_integer(p.to_bigint()), LOG_BITS)?;
    Ok(round_up_dyadic(&(ln_n1.hi / ln_p.lo + linear), OUTPUT_BITS))
}

/// Enclosure of `kappa_p` computed from logarithm intervals of `bits` bits.
pub fn kappa_interval(p: Prime, bits: u32) -> Result<Interval> {
    let ln_p = ln_interval(&Q::from_integer(p.to_bigint()), bits)?;
    let ratio = Q::new(BigInt::from(p.get() - 1), BigInt::from(p.get() - 2));
    Ok(Interval {
        lo: Q::one() + &ratio / ln_p.hi,
        hi: Q::one() + ratio / ln_p.lo,
    })
}

/// Rational upper approximation of `kappa_p = 1 + (p-1)/(p-2) / ln p`,
/// within `2^-60` of the true value and never below it.
pub fn kappa(p: Prime) -> Result<Q> {
    kappa_with_precision(p, LOG_BITS)
}

/// Same as [`kappa`] with a caller-chosen logarithm precision; coarser
/// precisions give larger (still valid) upper bounds.
pub fn kappa_with_precision(p: Prime, bits: u32) -> Result<Q> {
    let iv = kappa_interval(p, bits)?;
    Ok(round_up_dyadic(&iv.hi, OUTPUT_BITS.min(bits)))
}

/// Compares a rational with an integer-valued valuation difference.
pub fn cmp_rational_int(r: &Q, n: i64) -> Ordering {
    r.cmp(&Q::from_integer(BigInt::from(n)))
}
