//! Truncated power series with explicit precision, Laurent tails, Newton
//! polygons, and certified zero counts in the disk `|x| <= |p|`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padics::{kappa, Prime, Valuation};
use crate::rational::Q;
use crate::scalar::Coeff;

/// A power series known modulo `x^T`, where `T` is the length of the
/// coefficient vector.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<K = Q> {
    coeffs: Vec<K>,
}

impl<K: Coeff> TruncatedSeries<K> {
    /// Series whose precision is the number of supplied coefficients.
    pub fn new(coeffs: Vec<K>) -> Self {
        TruncatedSeries { coeffs }
    }

    /// Pads with zeros or truncates so that the precision is exactly `t`.
    pub fn with_precision(mut coeffs: Vec<K>, t: usize) -> Self {
        coeffs.resize(t, K::zero());
        TruncatedSeries { coeffs }
    }

    pub fn from_rationals(coeffs: &[Q], t: usize) -> Self {
        Self::with_precision(coeffs.iter().cloned().map(K::from_rational).collect(), t)
    }

    pub fn zero(t: usize) -> Self {
        Self::with_precision(Vec::new(), t)
    }

    pub fn constant(c: K, t: usize) -> Self {
        Self::with_precision(vec![c], t)
    }

    pub fn one(t: usize) -> Self {
        Self::constant(K::one(), t)
    }

    /// The series `x` (the local parameter itself).
    pub fn variable(t: usize) -> Self {
        Self::monomial(1, K::one(), t)
    }

    pub fn monomial(k: usize, c: K, t: usize) -> Self {
        let mut v = vec![K::zero(); t];
        if k < t {
            v[k] = c;
        }
        TruncatedSeries { coeffs: v }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<K> {
        self.coeffs
    }

    /// The coefficient `C_i` of `x^i`.
    pub fn coefficient(&self, i: usize) -> Result<&K> {
        self.coeffs.get(i).ok_or_else(|| {
            Error::InsufficientPrecision(format!(
                "coefficient {i} requested from a series known modulo x^{}",
                self.precision()
            ))
        })
    }

    pub fn truncate(&self, t: usize) -> Self {
        TruncatedSeries { coeffs: self.coeffs[..t.min(self.precision())].to_vec() }
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero known coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &K) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn map<L: Coeff>(&self, f: impl Fn(&K) -> L) -> TruncatedSeries<L> {
        TruncatedSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let t = self.precision();
        let c0 = self.coeffs.first().ok_or(Error::NonUnit)?;
        let inv0 = c0.inverse().ok_or(Error::NonUnit)?;
        let mut out: Vec<K> = Vec::with_capacity(t);
        out.push(inv0.clone());
        for n in 1..t {
            let mut acc = K::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc = acc + self.coeffs[k].clone() * out[n - k].clone();
                }
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// `d/dx`; precision drops by one.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * K::from_int(k as i64))
            .collect();
        TruncatedSeries { coeffs }
    }

    /// `k`-th derivative.
    pub fn derivative_n(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |s, _| s.derivative())
    }

    /// Formal antiderivative with constant term `c0`; precision rises by one.
    pub fn integrate(&self, c0: K) -> Self {
        let mut coeffs = Vec::with_capacity(self.precision() + 1);
        coeffs.push(c0);
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() * K::from_rational(Q::new(BigInt::one(), BigInt::from(k as u64 + 1))));
        }
        TruncatedSeries { coeffs }
    }

    /// Formal antiderivative with constant term zero.
    pub fn antiderivative(&self) -> Self {
        self.integrate(K::zero())
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(self.precision());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `self(inner(x))` for `inner` with zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if let Some(c) = inner.coeffs.first() {
            if !c.is_zero() {
                return Err(Error::Domain("composition needs an inner series of positive order".into()));
            }
        }
        let t = self.precision().min(inner.precision());
        let inner = inner.truncate(t);
        let mut acc = Self::zero(t);
        for c in self.coeffs[..t].iter().rev() {
            acc = &(&acc * &inner) + &Self::constant(c.clone(), t);
        }
        Ok(acc)
    }

    /// Square root with prescribed constant term `root` (`root^2 = c_0`).
    pub fn sqrt(&self, root: K) -> Result<Self> {
        let t = self.precision();
        if t == 0 {
            return Ok(self.clone());
        }
        if root.clone() * root.clone() != self.coeffs[0] || root.is_zero() {
            return Err(Error::Domain("square root needs a nonzero root of the constant term".into()));
        }
        let inv2r = (root.clone() * K::from_int(2)).inverse().expect("nonzero");
        let mut s = vec![root];
        for n in 1..t {
            let mut acc = self.coeffs[n].clone();
            for i in 1..n {
                acc = acc - s[i].clone() * s[n - i].clone();
            }
            s.push(acc * inv2r.clone());
        }
        Ok(TruncatedSeries { coeffs: s })
    }

    /// Minimum p-adic valuation among the known coefficients.
    pub fn min_valuation(&self, p: Prime) -> Valuation {
        self.coeffs.iter().map(|c| c.valuation(p)).min().unwrap_or(Valuation::Infinite)
    }
}

impl<K: Coeff> fmt::Debug for TruncatedSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<K: Coeff> fmt::Display for TruncatedSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.precision())
    }
}

impl<'a, K: Coeff> Add<&'a TruncatedSeries<K>> for &'a TruncatedSeries<K> {
    type Output = TruncatedSeries<K>;
    fn add(self, rhs: &'a TruncatedSeries<K>) -> TruncatedSeries<K> {
        let t = self.precision().min(rhs.precision());
        let coeffs = (0..t).map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()).collect();
        TruncatedSeries { coeffs }
    }
}

impl<'a, K: Coeff> Sub<&'a TruncatedSeries<K>> for &'a TruncatedSeries<K> {
    type Output = TruncatedSeries<K>;
    fn sub(self, rhs: &'a TruncatedSeries<K>) -> TruncatedSeries<K> {
        let t = self.precision().min(rhs.precision());
        let coeffs = (0..t).map(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()).collect();
        TruncatedSeries { coeffs }
    }
}

impl<K: Coeff> Neg for &TruncatedSeries<K> {
    type Output = TruncatedSeries<K>;
    fn neg(self) -> TruncatedSeries<K> {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<'a, K: Coeff> Mul<&'a TruncatedSeries<K>> for &'a TruncatedSeries<K> {
    type Output = TruncatedSeries<K>;
    fn mul(self, rhs: &'a TruncatedSeries<K>) -> TruncatedSeries<K> {
        let t = self.precision().min(rhs.precision());
        let mut out = vec![K::zero(); t];
        for (i, a) in self.coeffs[..t].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..t - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

/// `t^shift * series`, known modulo `t^(shift + precision)`.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentSeries<K: Coeff = Q> {
    pub shift: i64,
    pub series: TruncatedSeries<K>,
}

impl<K: Coeff> LaurentSeries<K> {
    pub fn from_series(series: TruncatedSeries<K>) -> Self {
        LaurentSeries { shift: 0, series }
    }

    pub fn constant(c: K, t: usize) -> Self {
        Self::from_series(TruncatedSeries::constant(c, t))
    }

    /// Absolute precision: the exponent of the first unknown term.
    pub fn abs_precision(&self) -> i64 {
        self.shift + self.series.precision() as i64
    }

    /// Strips known leading zeros into the shift.
    pub fn normalized(&self) -> Self {
        match self.series.order() {
            Some(k) if k > 0 => LaurentSeries {
                shift: self.shift + k as i64,
                series: TruncatedSeries::new(self.series.coeffs()[k..].to_vec()),
            },
            _ => self.clone(),
        }
    }

    /// Exponent of the leading term, if a nonzero term is known.
    pub fn order(&self) -> Option<i64> {
        self.series.order().map(|k| self.shift + k as i64)
    }

    fn aligned(&self, shift: i64, abs: i64) -> TruncatedSeries<K> {
        let len = (abs - shift).max(0) as usize;
        let offset = (self.shift - shift) as usize;
        let mut v = vec![K::zero(); len];
        for (k, c) in self.series.coeffs().iter().enumerate() {
            if offset + k < len {
                v[offset + k] = c.clone();
            }
        }
        TruncatedSeries::new(v)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let shift = self.shift.min(rhs.shift);
        let abs = self.abs_precision().min(rhs.abs_precision());
        LaurentSeries { shift, series: &self.aligned(shift, abs) + &rhs.aligned(shift, abs) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries { shift: self.shift, series: -&self.series }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let a = self.normalized();
        let b = rhs.normalized();
        LaurentSeries { shift: a.shift + b.shift, series: &a.series * &b.series }
    }

    pub fn scale(&self, c: &K) -> Self {
        LaurentSeries { shift: self.shift, series: self.series.scale(c) }
    }

    pub fn inverse(&self) -> Result<Self> {
        let a = self.normalized();
        if a.series.coeffs().first().map_or(true, |c| c.is_zero()) {
            return Err(Error::InsufficientPrecision(
                "cannot invert a Laurent series with no known nonzero term".into(),
            ));
        }
        Ok(LaurentSeries { shift: -a.shift, series: a.series.inverse()? })
    }

    /// `d/dt`.
    pub fn derivative(&self) -> Self {
        let s = self.shift;
        let coeffs = self
            .series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.clone() * K::from_int(s + k as i64))
            .collect();
        LaurentSeries { shift: s - 1, series: TruncatedSeries::new(coeffs) }
    }

    /// Power series with absolute precision at least `t`, or an error if the
    /// expansion has a pole or is not known far enough.
    pub fn to_series(&self, t: usize) -> Result<TruncatedSeries<K>> {
        let a = self.normalized();
        if a.shift < 0 && a.series.order() == Some(0) {
            return Err(Error::Pole(format!("expansion has a pole of order {}", -a.shift)));
        }
        if a.abs_precision() < t as i64 {
            return Err(Error::InsufficientPrecision(format!(
                "expansion known modulo t^{}, need t^{t}",
                a.abs_precision()
            )));
        }
        Ok(self.aligned(0, t as i64))
    }
}

/// What is known about coefficients beyond the truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationFloor {
    /// The series is a polynomial: unknown coefficients are zero.
    Exact,
    /// Every coefficient at index `>= T` has valuation at least this value.
    AtLeast(i64),
}

/// Lower convex hull of `(i, v(C_i))`, with collinear interior points removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(usize, i64)>,
    certified: bool,
    precision: usize,
}

impl NewtonPolygon {
    pub fn vertices(&self) -> &[(usize, i64)] {
        &self.vertices
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    /// Edge slopes, left to right.
    pub fn slopes(&self) -> Vec<Q> {
        self.vertices
            .windows(2)
            .map(|w| Q::new(BigInt::from(w[1].1 - w[0].1), BigInt::from((w[1].0 - w[0].0) as i64)))
            .collect()
    }

    /// Endpoint of the chain of edges with slope `<= -1` starting at the
    /// leftmost vertex; returns that vertex when the first slope exceeds -1.
    fn slope_chain_end(vertices: &[(usize, i64)]) -> (usize, i64) {
        let mut end = vertices[0];
        for w in vertices.windows(2) {
            let (di, dv) = ((w[1].0 - w[0].0) as i64, w[1].1 - w[0].1);
            if dv <= -di {
                end = w[1];
            } else {
                break;
            }
        }
        end
    }

    /// Length `M` of the slope `<= -1` part.
    pub fn slope_le_minus_one_length(&self) -> Result<usize> {
        if !self.certified {
            return Err(Error::InsufficientPrecision(format!(
                "slope <= -1 segment not determined modulo x^{}",
                self.precision
            )));
        }
        Ok(Self::slope_chain_end(&self.vertices).0)
    }
}

fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 as i128 - o.0 as i128) * (pt.1 as i128 - o.1 as i128)
                - (a.1 as i128 - o.1 as i128) * (pt.0 as i128 - o.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Newton polygon of the known part of `f`. The slope `<= -1` part is
/// certified when no coefficient beyond the truncation (valuation at least
/// the floor) could extend or lower it.
pub fn newton_polygon<K: Coeff>(f: &TruncatedSeries<K>, p: Prime, floor: ValuationFloor) -> Result<NewtonPolygon> {
    let points: Vec<(usize, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation(p).finite().map(|v| (i, v)))
        .collect();
    if points.is_empty() {
        return Err(Error::IndeterminatePolygon);
    }
    let vertices = lower_hull(&points);
    let t = f.precision() as i64;
    let certified = match floor {
        ValuationFloor::Exact => true,
        ValuationFloor::AtLeast(w) => {
            // the worst unknown point is (T, w); it must lie strictly above the
            // slope -1 line through the chain endpoint (M, v_M)
            let (m, vm) = NewtonPolygon::slope_chain_end(&vertices);
            w + (t - m as i64) > vm
        }
    };
    Ok(NewtonPolygon { vertices, certified, precision: f.precision() })
}

/// Upper bound for the number of zeros of `f` in `|x| <= |p|`: the length of
/// the slope `<= -1` segment of its Newton polygon.
pub fn zero_count_bound<K: Coeff>(f: &TruncatedSeries<K>, p: Prime, floor: ValuationFloor) -> Result<usize> {
    newton_polygon(f, p, floor)?.slope_le_minus_one_length()
}

/// `min S(f)`: the least index attaining the minimal coefficient valuation.
/// Certified when no unknown coefficient can undercut the known minimum.
pub fn min_valuation_index<K: Coeff>(f: &TruncatedSeries<K>, p: Prime, floor: ValuationFloor) -> Result<usize> {
    let (idx, v) = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation(p).finite().map(|v| (i, v)))
        .min_by_key(|&(i, v)| (v, i))
        .ok_or(Error::IndeterminatePolygon)?;
    match floor {
        ValuationFloor::AtLeast(w) if w < v => Err(Error::InsufficientPrecision(format!(
            "minimum valuation {v} among the first {} coefficients is not certified by floor {w}",
            f.precision()
        ))),
        _ => Ok(idx),
    }
}

/// Checks the slope-transfer inequality `M(G) < kappa_p (N + min S(D(G)))`.
pub fn slope_transfer_check<K: Coeff>(
    g: &TruncatedSeries<K>,
    g_floor: ValuationFloor,
    dg: &TruncatedSeries<K>,
    dg_floor: ValuationFloor,
    order: usize,
    p: Prime,
) -> Result<bool> {
    let m = zero_count_bound(g, p, g_floor)?;
    let s = min_valuation_index(dg, p, dg_floor)?;
    let rhs = kappa(p)? * Q::from_integer(BigInt::from((order + s) as u64));
    Ok(Q::from_integer(BigInt::from(m as u64)) < rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn s(c: &[i64], t: usize) -> TruncatedSeries {
        TruncatedSeries::from_rationals(&c.iter().map(|&n| q(n)).collect::<Vec<_>>(), t)
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn ring_operation_examples() {
        let d = s(&[1, 1, 1], 3).derivative();
        assert_eq!(d, s(&[1, 2], 2));
        assert_eq!(s(&[1, 2], 2).antiderivative(), s(&[0, 1, 1], 3));
        assert_eq!(s(&[1, -1], 4).inverse().unwrap(), s(&[1, 1, 1, 1], 4));
        assert_eq!(s(&[0, 1], 4).inverse(), Err(Error::NonUnit));
    }

    #[test]
    fn coefficient_access() {
        let f = s(&[1, 0, 3], 3);
        assert_eq!(f.coefficient(2).unwrap(), &q(3));
        assert_eq!(s(&[], 1).coefficient(0).unwrap(), &q(0));
        assert!(matches!(f.coefficient(3), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn composition_and_sqrt() {
        // (1 + x)^2 composed with x + x^2
        let f = s(&[1, 2, 1], 5);
        let g = s(&[0, 1, 1], 5);
        let h = f.compose(&g).unwrap();
        let expect = &(&s(&[1], 5) + &g) * &(&s(&[1], 5) + &g);
        assert_eq!(h, expect);
        assert!(f.compose(&f).is_err());
        let r = f.sqrt(q(1)).unwrap();
        assert_eq!(r, s(&[1, 1], 5));
    }

    #[test]
    fn sqrt_of_one_plus_t() {
        // sqrt(1 + t + t^3) = 1 + t/2 - t^2/8 + ...
        let r = s(&[1, 1, 0, 1], 3).sqrt(q(1)).unwrap();
        assert_eq!(r.coeffs(), &[q(1), qf(1, 2), qf(-1, 8)]);
    }

    #[test]
    fn newton_polygon_examples() {
        let f = s(&[27, 3, 0, 1], 4);
        let np = newton_polygon(&f, p(3), ValuationFloor::Exact).unwrap();
        assert_eq!(np.vertices(), &[(0, 3), (1, 1), (3, 0)]);
        assert_eq!(np.slope_le_minus_one_length().unwrap(), 1);

        let one = s(&[1], 1);
        let np = newton_polygon(&one, p(3), ValuationFloor::Exact).unwrap();
        assert_eq!(np.vertices(), &[(0, 0)]);
        assert_eq!(np.slope_le_minus_one_length().unwrap(), 0);

        // (x - 3)(x - 9) = 27 - 12x + x^2
        let g = s(&[27, -12, 1], 3);
        let np = newton_polygon(&g, p(3), ValuationFloor::Exact).unwrap();
        assert_eq!(np.vertices(), &[(0, 3), (1, 1), (2, 0)]);
        assert_eq!(zero_count_bound(&g, p(3), ValuationFloor::Exact).unwrap(), 2);

        assert_eq!(zero_count_bound(&s(&[-5, 0, 1], 3), p(5), ValuationFloor::Exact).unwrap(), 0);
        assert_eq!(newton_polygon(&s(&[0, 0], 2), p(5), ValuationFloor::Exact), Err(Error::IndeterminatePolygon));
    }

    #[test]
    fn collinear_points_are_dropped() {
        // valuations 2, 1, 0 lie on one line
        let f = s(&[9, 3, 1], 3);
        let np = newton_polygon(&f, p(3), ValuationFloor::Exact).unwrap();
        assert_eq!(np.vertices(), &[(0, 2), (2, 0)]);
    }

    #[test]
    fn certification_depends_on_floor() {
        // 27 + 3x + x^3 known modulo x^4: endpoint (1, 1); the point (4, 0)
        // lies above the slope -1 line through (1, 1)
        let f = s(&[27, 3, 0, 1], 4);
        assert!(newton_polygon(&f, p(3), ValuationFloor::AtLeast(0)).unwrap().certified());
        // with floor -2 an unseen (4, -2) would extend the segment
        let np = newton_polygon(&f, p(3), ValuationFloor::AtLeast(-2)).unwrap();
        assert!(!np.certified());
        assert!(matches!(np.slope_le_minus_one_length(), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn min_valuation_index_examples() {
        assert_eq!(min_valuation_index(&s(&[27, 3, 0, 1], 4), p(3), ValuationFloor::AtLeast(0)).unwrap(), 3);
        assert_eq!(min_valuation_index(&s(&[5, 1], 2), p(5), ValuationFloor::AtLeast(0)).unwrap(), 1);
        assert!(matches!(
            min_valuation_index(&s(&[5, 25], 2), p(5), ValuationFloor::AtLeast(0)),
            Err(Error::InsufficientPrecision(_))
        ));
    }

    #[test]
    fn slope_transfer_trivial_case() {
        let one = s(&[1], 3);
        assert!(slope_transfer_check(&one, ValuationFloor::Exact, &one, ValuationFloor::Exact, 1, p(5)).unwrap());
    }

    #[test]
    fn laurent_arithmetic() {
        let t = LaurentSeries::from_series(s(&[0, 1], 6));
        let inv = t.inverse().unwrap();
        assert_eq!(inv.shift, -1);
        let one = t.mul(&inv);
        assert_eq!(one.to_series(5).unwrap(), s(&[1], 5));
        assert!(matches!(inv.to_series(2), Err(Error::Pole(_))));
        let d = inv.derivative();
        assert_eq!(d.order(), Some(-2));
        let sum = inv.add(&LaurentSeries::constant(q(3), 6));
        assert_eq!(sum.shift, -1);
        assert_eq!(sum.abs_precision(), 4);
    }
}
