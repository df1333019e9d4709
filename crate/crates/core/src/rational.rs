//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-7/4"` or `" 12 "`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Smallest integer `>= r`.
pub fn ceil(r: &Q) -> BigInt {
    r.ceil().to_integer()
}

/// Largest integer `<= r`.
pub fn floor(r: &Q) -> BigInt {
    r.floor().to_integer()
}

/// Rounds `r` up to a multiple of `2^-bits`.
pub fn round_up_dyadic(r: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = r * Q::from_integer(scale.clone());
    Q::new(ceil(&scaled), scale)
}

/// Rounds `r` down to a multiple of `2^-bits`.
pub fn round_down_dyadic(r: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = r * Q::from_integer(scale.clone());
    Q::new(floor(&scaled), scale)
}

/// Decimal rendering with a fixed number of digits after the point (truncated
/// toward zero); only used for human-readable output.
pub fn to_decimal(r: &Q, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let int = a.trunc().to_integer();
    let frac = a - Q::from_integer(int.clone());
    let scaled = (frac * Q::from_integer(BigInt::from(10u32).pow(digits as u32)))
        .trunc()
        .to_integer();
    let mut s = format!("{}{}", if neg { "-" } else { "" }, int);
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", scaled.to_string(), width = digits));
    }
    s
}
