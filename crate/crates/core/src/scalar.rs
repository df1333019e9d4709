//! Coefficient types for truncated series.
//!
//! Most series have exact rational coefficients. Expansions in residue disks
//! whose center has no rational lift carry coefficients in a quadratic field
//! `Q(sqrt d)`, embedded into `Q_p` by the Hensel lift of `sqrt d` that
//! reduces to a chosen residue; [`QuadScalar`] implements that case.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::padics::{reduce_mod_p, sqrt_mod_pk, valuation, Prime, Valuation};
use crate::rational::Q;

/// Field operations plus the p-adic data the Newton-polygon and niceness
/// code needs from a coefficient.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_rational(r: Q) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(Q::from_integer(BigInt::from(n)))
    }

    fn inverse(&self) -> Option<Self>;

    fn valuation(&self, p: Prime) -> Valuation;

    /// Image in `F_p`, or `None` when the element is not p-integral.
    fn reduce(&self, p: Prime) -> Option<u64>;

    fn to_rational(&self) -> Option<Q>;
}

impl Coeff for BigRational {
    fn from_rational(r: Q) -> Self {
        r
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn valuation(&self, p: Prime) -> Valuation {
        valuation(self, p)
    }

    fn reduce(&self, p: Prime) -> Option<u64> {
        reduce_mod_p(self, p)
    }

    fn to_rational(&self) -> Option<Q> {
        Some(self.clone())
    }
}

/// The quadratic field `Q(sqrt d)` together with its embedding into `Q_p`:
/// `sqrt d` is the p-adic root congruent to `residue` mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radicand {
    pub d: Q,
    pub p: Prime,
    pub residue: u64,
}

/// `re + im * sqrt(d)`. Elements with `im = 0` need no radicand.
#[derive(Clone)]
pub struct QuadScalar {
    pub re: Q,
    pub im: Q,
    radicand: Option<Arc<Radicand>>,
}

impl QuadScalar {
    pub fn rational(r: Q) -> Self {
        QuadScalar { re: r, im: Q::zero(), radicand: None }
    }

    /// `im * sqrt(d)` in the field described by `radicand`.
    pub fn new(re: Q, im: Q, radicand: Arc<Radicand>) -> Self {
        QuadScalar { re, im, radicand: Some(radicand) }
    }

    pub fn radicand(&self) -> Option<&Arc<Radicand>> {
        self.radicand.as_ref()
    }

    fn merged(a: &Option<Arc<Radicand>>, b: &Option<Arc<Radicand>>) -> Option<Arc<Radicand>> {
        match (a, b) {
            (Some(x), Some(y)) => {
                assert!(Arc::ptr_eq(x, y) || x == y, "mixing scalars from different quadratic fields");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    fn d(&self) -> Q {
        self.radicand.as_ref().map(|r| r.d.clone()).unwrap_or_else(Q::zero)
    }

    /// Valuation of `re + im sqrt d` under the chosen embedding. When the two
    /// parts have equal valuation, `sqrt d` is lifted far enough that the
    /// answer is exact: `v(x) <= v(norm) - min(v(re), v(im))`.
    fn quad_valuation(&self, rad: &Radicand) -> Valuation {
        let vr = valuation(&self.re, rad.p);
        let vi = valuation(&self.im, rad.p);
        if vr != vi || vi.is_infinite() {
            return vr.min(vi);
        }
        let m = vr.finite().unwrap();
        let norm = &self.re * &self.re - &self.im * &self.im * &rad.d;
        let vn = valuation(&norm, rad.p).finite().expect("d is not a rational square");
        let k = (vn - 2 * m + 1).max(1) as u32;
        // scale so that both parts are integral before reducing mod p^k
        let shift = Q::from_integer(rad.p.to_bigint()).pow(-m as i32);
        let re = &self.re * &shift;
        let im = &self.im * &shift;
        let root = sqrt_mod_pk(&rad.d, rad.p, rad.residue, k).expect("radicand lifts");
        let approx = re + im * Q::from_integer(root);
        match valuation(&approx, rad.p) {
            Valuation::Finite(v) if v < k as i64 => Valuation::Finite(v + m),
            _ => unreachable!("lifting precision chosen from the norm"),
        }
    }
}

impl PartialEq for QuadScalar {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl fmt::Debug for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})*sqrt({})", self.im, self.d())
        } else {
            write!(f, "{} + ({})*sqrt({})", self.re, self.im, self.d())
        }
    }
}

impl Add for QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: QuadScalar) -> QuadScalar {
        let radicand = Self::merged(&self.radicand, &rhs.radicand);
        QuadScalar { re: self.re + rhs.re, im: self.im + rhs.im, radicand }
    }
}

impl Sub for QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: QuadScalar) -> QuadScalar {
        let radicand = Self::merged(&self.radicand, &rhs.radicand);
        QuadScalar { re: self.re - rhs.re, im: self.im - rhs.im, radicand }
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar { re: -self.re, im: -self.im, radicand: self.radicand }
    }
}

impl Mul for QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: QuadScalar) -> QuadScalar {
        let radicand = Self::merged(&self.radicand, &rhs.radicand);
        if self.im.is_zero() {
            return QuadScalar { re: &self.re * &rhs.re, im: self.re * rhs.im, radicand };
        }
        if rhs.im.is_zero() {
            return QuadScalar { re: &self.re * &rhs.re, im: self.im * rhs.re, radicand };
        }
        let d = radicand.as_ref().map(|r| r.d.clone()).expect("radicand present");
        QuadScalar {
            re: &self.re * &rhs.re + &self.im * &rhs.im * d,
            im: self.re * rhs.im + self.im * rhs.re,
            radicand,
        }
    }
}

impl Zero for QuadScalar {
    fn zero() -> Self {
        QuadScalar::rational(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for QuadScalar {
    fn one() -> Self {
        QuadScalar::rational(Q::one())
    }
}

impl Coeff for QuadScalar {
    fn from_rational(r: Q) -> Self {
        QuadScalar::rational(r)
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(QuadScalar { re: self.re.recip(), im: Q::zero(), radicand: self.radicand.clone() });
        }
        let norm = &self.re * &self.re - &self.im * &self.im * self.d();
        Some(QuadScalar {
            re: &self.re / &norm,
            im: -(&self.im / &norm),
            radicand: self.radicand.clone(),
        })
    }

    fn valuation(&self, p: Prime) -> Valuation {
        match &self.radicand {
            Some(rad) if !self.im.is_zero() => {
                assert_eq!(rad.p, p, "quadratic embedding was built for another prime");
                self.quad_valuation(rad)
            }
            _ => valuation(&self.re, p),
        }
    }

    fn reduce(&self, p: Prime) -> Option<u64> {
        let re = reduce_mod_p(&self.re, p)?;
        if self.im.is_zero() {
            return Some(re);
        }
        let rad = self.radicand.as_ref()?;
        let im = reduce_mod_p(&self.im, p)?;
        Some((re + im * rad.residue) % p.get())
    }

    fn to_rational(&self) -> Option<Q> {
        if self.im.is_zero() {
            Some(self.re.clone())
        } else {
            None
        }
    }
}
