//! Local parameters on residue disks and expansions of curve functions.
//!
//! * affine non-Weierstrass disk: `t = x - x0`, `y = y0 sqrt(f(x0 + t)/f(x0))`;
//!   when no small lift `x0` makes `f(x0)` a rational square, `y0 = sqrt f(x0)`
//!   lives in a quadratic field embedded p-adically by the residue of `y`.
//! * affine Weierstrass disk: `t = y`, `x = alpha + s(t)` with `f(alpha + s) = t^2`,
//!   for a rational root `alpha` of `f` lifting the center.
//! * infinity on an even model: `t = 1/x`, `y = +-t^-(g+1) sqrt(t^(2g+2) f(1/t))`.
//! * infinity on an odd model: `t = x^g/y`; `w = 1/x` solves `w = t^2 phi(w)`
//!   with `phi(w) = w^(2g+1) f(1/w)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::funcfield::CurveFunction;
use crate::hyperelliptic::{CurveModel, DiskCenter, DiskDescriptor, DiskKind, ModelKind};
use crate::padics::{reduce_mod_p, reduce_mod_pk, Prime};
use crate::poly::Poly;
use crate::rational::Q;
use crate::scalar::{Coeff, QuadScalar, Radicand};
use crate::series::{LaurentSeries, TruncatedSeries};

/// Coefficient type of disk expansions.
pub type Scalar = QuadScalar;

/// How far from the residue of the center a rational lift is searched.
const LIFT_SEARCH: i64 = 60;

#[derive(Debug, Clone, PartialEq)]
pub enum ChartCenter {
    Affine { x0: Q, y0: Scalar },
    Weierstrass { alpha: Q },
    InfinityEven { sign: i8 },
    InfinityOdd,
}

/// The expansions of `x`, `y` and `dx/dt` in a designated local parameter.
#[derive(Debug, Clone)]
pub struct Chart {
    disk: DiskDescriptor,
    center: ChartCenter,
    x: LaurentSeries<Scalar>,
    y: LaurentSeries<Scalar>,
    dxdt: LaurentSeries<Scalar>,
    work: usize,
}

fn to_scalar(s: &TruncatedSeries<Q>) -> TruncatedSeries<Scalar> {
    s.map(|c| Scalar::from_rational(c.clone()))
}

fn laurent(shift: i64, s: &TruncatedSeries<Q>) -> LaurentSeries<Scalar> {
    LaurentSeries { shift, series: to_scalar(s) }
}

/// `s * t^2`, keeping precision `w`.
fn times_t2(s: &TruncatedSeries<Q>, w: usize) -> TruncatedSeries<Q> {
    let mut v = vec![Q::zero(), Q::zero()];
    v.extend_from_slice(s.coeffs());
    TruncatedSeries::with_precision(v, w)
}

fn exact_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Q::new(n, d))
}

fn centered_order(k: i64) -> i64 {
    // 0, 1, -1, 2, -2, ...
    if k % 2 == 1 {
        (k + 1) / 2
    } else {
        -k / 2
    }
}

/// A lift `(x0, y0)` of an affine non-Weierstrass point.
pub fn affine_lift(f: &Poly, p: Prime, xbar: u64, ybar: u64) -> Result<(Q, Scalar)> {
    let pv = p.get() as i64;
    for k in 0..=2 * LIFT_SEARCH {
        let x0 = Q::from_integer(BigInt::from(xbar as i64 + centered_order(k) * pv));
        let v = f.eval(&x0);
        if let Some(s) = exact_sqrt(&v) {
            for cand in [s.clone(), -s] {
                if reduce_mod_p(&cand, p) == Some(ybar) {
                    return Ok((x0, Scalar::from_rational(cand)));
                }
            }
        }
    }
    let x0 = Q::from_integer(BigInt::from(xbar));
    let d = f.eval(&x0);
    if reduce_mod_p(&d, p).is_none_or(|r| (ybar * ybar) % p.get() != r) {
        return Err(Error::Domain(format!("({xbar}, {ybar}) is not a point of the reduction")));
    }
    let rad = Arc::new(Radicand { d, p, residue: ybar });
    Ok((x0, QuadScalar::new(Q::zero(), Q::one(), rad)))
}

fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Q> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        (r0, r1) = (r1.clone(), &r0 - &q * &r1);
        (t0, t1) = (t1.clone(), &t0 - &q * &t1);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    Some(Q::new(r1, t1))
}

/// The rational root of `f` reducing to `xbar`, if there is one.
pub fn weierstrass_root(f: &Poly, p: Prime, xbar: u64) -> Result<Q> {
    let lcm = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let hmax = f.coeffs().iter().map(|c| (c * Q::from_integer(lcm.clone())).numer().abs()).max().unwrap_or_default();
    let b = &lcm + &hmax;
    let target = BigInt::from(2) * &b * &b;
    let pb = p.to_bigint();
    let mut k = 1u32;
    while pb.pow(k) <= target {
        k += 1;
    }
    let m = pb.pow(k);
    let fk: Vec<BigInt> = f.coeffs().iter().map(|c| reduce_mod_pk(c, p, k).expect("integral")).collect();
    let dk: Vec<BigInt> = f.derivative().coeffs().iter().map(|c| reduce_mod_pk(c, p, k).expect("integral")).collect();
    let ev = |c: &[BigInt], x: &BigInt| c.iter().rev().fold(BigInt::zero(), |acc, a| (acc * x + a).mod_floor(&m));
    let mut r = BigInt::from(xbar);
    for _ in 0..=(k as usize).ilog2() + 2 {
        let inv = crate::padics::mod_inverse(&ev(&dk, &r), &m)
            .ok_or_else(|| Error::Domain("Weierstrass center is a multiple root mod p".into()))?;
        r = (&r - ev(&fk, &r) * inv).mod_floor(&m);
    }
    if let Some(alpha) = rational_reconstruct(&r, &m) {
        if f.eval(&alpha).is_zero() && reduce_mod_p(&alpha, p) == Some(xbar) {
            return Ok(alpha);
        }
    }
    Err(Error::NotAlgebraic(format!(
        "the root of f reducing to {xbar} mod {p} is not rational; Weierstrass disk expansions need a rational center"
    )))
}

impl Chart {
    /// Builds the chart with relative working precision `work`.
    pub fn new(curve: &CurveModel, disk: DiskDescriptor, p: Prime, work: usize) -> Result<Chart> {
        let f = curve.f();
        let g = curve.genus() as i64;
        let w = work.max(4);
        let (center, x, y) = match (disk.kind, disk.center) {
            (DiskKind::AffineNonWeierstrass, DiskCenter::Affine { x: xb, y: yb }) => {
                let (x0, y0) = affine_lift(f, p, xb, yb)?;
                let x = laurent(0, &TruncatedSeries::from_rationals(&[x0.clone(), Q::one()], w));
                let shifted = f.taylor_shift(&x0);
                let u = TruncatedSeries::from_rationals(shifted.coeffs(), w).scale(&shifted.coeff(0).recip());
                let y = LaurentSeries::from_series(to_scalar(&u.sqrt(Q::one())?).scale(&y0));
                (ChartCenter::Affine { x0, y0 }, x, y)
            }
            (DiskKind::AffineWeierstrass, DiskCenter::Affine { x: xb, .. }) => {
                let alpha = weierstrass_root(f, p, xb)?;
                let shifted = f.taylor_shift(&alpha);
                let h = Poly::new(shifted.coeffs()[1..].to_vec());
                let mut s = TruncatedSeries::<Q>::zero(w);
                for _ in 0..w / 2 + 2 {
                    s = times_t2(&h.eval_series(&s).inverse()?, w);
                }
                let x = &TruncatedSeries::constant(alpha.clone(), w) + &s;
                let y = TruncatedSeries::variable(w);
                (ChartCenter::Weierstrass { alpha }, laurent(0, &x), laurent(0, &y))
            }
            (DiskKind::Infinite, c @ (DiskCenter::InfinityPlus | DiskCenter::InfinityMinus)) => {
                let sign: i8 = if c == DiskCenter::InfinityPlus { 1 } else { -1 };
                let phi = f.reversed(2 * curve.genus() + 2);
                let root = TruncatedSeries::from_rationals(phi.coeffs(), w).sqrt(Q::one())?;
                let root = root.scale(&Q::from_integer(BigInt::from(sign)));
                (ChartCenter::InfinityEven { sign }, laurent(-1, &TruncatedSeries::one(w)), laurent(-(g + 1), &root))
            }
            (DiskKind::Infinite, DiskCenter::Infinity) => {
                let phi = f.reversed(2 * curve.genus() + 1);
                let mut wser = TruncatedSeries::<Q>::zero(w);
                for _ in 0..w / 2 + 2 {
                    wser = times_t2(&phi.eval_series(&wser), w);
                }
                let u = TruncatedSeries::new(wser.coeffs()[2..].to_vec());
                let uinv = u.inverse()?;
                let y = uinv.pow(curve.genus());
                (ChartCenter::InfinityOdd, laurent(-2, &uinv), laurent(-(2 * g + 1), &y))
            }
            _ => return Err(Error::InvalidInput(format!("inconsistent disk descriptor {disk:?}"))),
        };
        if curve.kind() == ModelKind::Odd && matches!(center, ChartCenter::InfinityEven { .. }) {
            return Err(Error::InvalidInput("odd models have a single point at infinity".into()));
        }
        let dxdt = x.derivative();
        Ok(Chart { disk, center, x, y, dxdt, work: w })
    }

    pub fn disk(&self) -> DiskDescriptor {
        self.disk
    }

    pub fn center(&self) -> &ChartCenter {
        &self.center
    }

    pub fn work(&self) -> usize {
        self.work
    }

    pub fn x(&self) -> &LaurentSeries<Scalar> {
        &self.x
    }

    pub fn y(&self) -> &LaurentSeries<Scalar> {
        &self.y
    }

    pub fn dxdt(&self) -> &LaurentSeries<Scalar> {
        &self.dxdt
    }

    /// Human-readable description of the local parameter.
    pub fn parameter(&self) -> String {
        match &self.center {
            ChartCenter::Affine { x0, y0 } if x0.is_negative() => format!("t = x + {} (center y = {y0})", -x0),
            ChartCenter::Affine { x0, y0 } => format!("t = x - {x0} (center y = {y0})"),
            ChartCenter::Weierstrass { alpha } => format!("t = y (center x = {alpha})"),
            ChartCenter::InfinityEven { sign } => format!("t = 1/x (sheet y/x^(g+1) -> {sign})"),
            ChartCenter::InfinityOdd => "t = x^g/y".to_string(),
        }
    }

    pub fn expand_laurent(&self, func: &CurveFunction) -> Result<LaurentSeries<Scalar>> {
        func.expand_laurent(self)
    }

    /// Power series of `func` modulo `t^t_prec`.
    pub fn expand(&self, func: &CurveFunction, t_prec: usize) -> Result<TruncatedSeries<Scalar>> {
        self.expand_laurent(func)?.to_series(t_prec)
    }

    /// `dx/dt` as a power series modulo `t^t_prec`.
    pub fn dxdt_series(&self, t_prec: usize) -> Result<TruncatedSeries<Scalar>> {
        self.dxdt.to_series(t_prec)
    }

    /// `t/(dx/dt)`-type conversion factor: `d/omega_0 = (y / (dx/dt)) d/dt`.
    pub fn omega0_factor(&self, t_prec: usize) -> Result<TruncatedSeries<Scalar>> {
        self.y.mul(&self.dxdt.inverse()?).to_series(t_prec)
    }
}

/// Margins tried on top of the requested precision when building charts.
const MARGINS: [usize; 4] = [8, 32, 128, 512];

/// Expansion of `func` on `disk` to absolute precision `t_prec`, building a
/// chart with increasing working precision until the result is determined.
pub fn expand_at(
    func: &CurveFunction,
    curve: &CurveModel,
    disk: DiskDescriptor,
    p: Prime,
    t_prec: usize,
) -> Result<TruncatedSeries<Scalar>> {
    let mut last = None;
    for m in MARGINS {
        let chart = Chart::new(curve, disk, p, t_prec + m)?;
        match chart.expand(func, t_prec) {
            Err(e @ Error::InsufficientPrecision(_)) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Laurent expansion known at least to absolute order `t_prec`.
pub fn expand_laurent_at(
    func: &CurveFunction,
    curve: &CurveModel,
    disk: DiskDescriptor,
    p: Prime,
    t_prec: i64,
) -> Result<LaurentSeries<Scalar>> {
    for m in MARGINS {
        let chart = Chart::new(curve, disk, p, t_prec.max(0) as usize + m)?;
        let l = chart.expand_laurent(func)?;
        if l.abs_precision() >= t_prec {
            return Ok(l);
        }
    }
    Err(Error::InsufficientPrecision(format!("could not expand to order {t_prec}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperelliptic::ModelKind;
    use crate::rational::{q, qf};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn rat(s: &TruncatedSeries<Scalar>) -> Vec<Q> {
        s.coeffs().iter().map(|c| c.to_rational().unwrap()).collect()
    }

    #[test]
    fn y_near_a_rational_point() {
        let c = CurveModel::from_ints(ModelKind::Odd, &[1, 1, 0, 1]).unwrap();
        let f = Arc::new(c.f().clone());
        let disk = DiskDescriptor { kind: DiskKind::AffineNonWeierstrass, center: DiskCenter::Affine { x: 0, y: 1 } };
        let s = expand_at(&CurveFunction::y(&f), &c, disk, p(5), 3).unwrap();
        assert_eq!(rat(&s), vec![q(1), qf(1, 2), qf(-1, 8)]);
        let x = expand_at(&CurveFunction::x(&f), &c, disk, p(5), 3).unwrap();
        assert_eq!(rat(&x), vec![q(0), q(1), q(0)]);
    }

    #[test]
    fn quadratic_center_when_no_square_lift() {
        // y^2 = x^3 + 3 at p = 7: x = 1 gives 4 = 2^2, fine; x = 3 gives 30 = 2 mod 7,
        // which is 3^2 mod 7 but 30 + 7k is rarely a square
        let c = CurveModel::from_ints(ModelKind::Odd, &[3, 0, 0, 1]).unwrap();
        let f = Arc::new(c.f().clone());
        let disk = DiskDescriptor { kind: DiskKind::AffineNonWeierstrass, center: DiskCenter::Affine { x: 3, y: 3 } };
        let chart = Chart::new(&c, disk, p(7), 10).unwrap();
        let y = chart.expand(&CurveFunction::y(&f), 6).unwrap();
        let y2 = &y * &y;
        let fx = chart.expand(&CurveFunction::from_poly(&f, c.f().clone()), 6).unwrap();
        assert_eq!(y2, fx);
        assert_eq!(y.coeffs()[0].reduce(p(7)), Some(3));
    }

    #[test]
    fn weierstrass_chart_satisfies_equation() {
        // x(x-1)(x-2)(x-3)(x-4)(x-5)
        let f = Poly::from_ints(&[0, 1]);
        let f = (0..6).fold(Poly::one(), |acc, r| &acc * &(&f - &Poly::from_ints(&[r])));
        let c = CurveModel::new(ModelKind::Even, 2, f.coeffs().to_vec()).unwrap();
        let fa = Arc::new(c.f().clone());
        let disk = DiskDescriptor { kind: DiskKind::AffineWeierstrass, center: DiskCenter::Affine { x: 3, y: 0 } };
        let chart = Chart::new(&c, disk, p(7), 20).unwrap();
        assert_eq!(chart.center(), &ChartCenter::Weierstrass { alpha: q(3) });
        let y = chart.expand(&CurveFunction::y(&fa), 12).unwrap();
        let fx = chart.expand(&CurveFunction::from_poly(&fa, f.clone()), 12).unwrap();
        assert_eq!(&y * &y, fx);
    }

    #[test]
    fn odd_infinity_orders() {
        let c = CurveModel::from_ints(ModelKind::Odd, &[1, 0, 0, 0, 0, 1]).unwrap();
        let f = Arc::new(c.f().clone());
        let disk = DiskDescriptor { kind: DiskKind::Infinite, center: DiskCenter::Infinity };
        let inv_x = CurveFunction::x(&f).inverse().unwrap();
        let l = expand_laurent_at(&inv_x, &c, disk, p(3), 8).unwrap();
        assert_eq!(l.order(), Some(2));
        let y = expand_laurent_at(&CurveFunction::y(&f), &c, disk, p(3), 4).unwrap();
        assert_eq!(y.order(), Some(-5));
        // t = x^2 / y
        let t = CurveFunction::x(&f).mul(&CurveFunction::x(&f)).mul(&CurveFunction::y(&f).inverse().unwrap());
        let ts = expand_laurent_at(&t, &c, disk, p(3), 6).unwrap().to_series(6).unwrap();
        assert_eq!(rat(&ts), vec![q(0), q(1), q(0), q(0), q(0), q(0)]);
    }

    #[test]
    fn even_infinity_sheets() {
        let c = CurveModel::from_ints(ModelKind::Even, &[1, 0, 0, 0, 0, 0, 1]).unwrap();
        let f = Arc::new(c.f().clone());
        for (center, sign) in [(DiskCenter::InfinityPlus, 1), (DiskCenter::InfinityMinus, -1)] {
            let disk = DiskDescriptor { kind: DiskKind::Infinite, center };
            // y / x^3 -> sign
            let x3 = CurveFunction::from_poly(&f, Poly::monomial(3, Q::one()));
            let r = CurveFunction::y(&f).mul(&x3.inverse().unwrap());
            let s = expand_at(&r, &c, disk, p(5), 4).unwrap();
            assert_eq!(rat(&s)[0], q(sign));
        }
    }

    #[test]
    fn rational_roots() {
        let f = Poly::from_ints(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        assert_eq!(weierstrass_root(&f, p(5), 2).unwrap(), q(2));
        let g = &Poly::from_ints(&[-2, 0, 1]) * &Poly::from_ints(&[1, 1]); // (x^2 - 2)(x + 1)
        assert_eq!(weierstrass_root(&g, p(7), 6).unwrap(), q(-1));
        assert!(matches!(weierstrass_root(&g, p(7), 3), Err(Error::NotAlgebraic(_))));
    }
}
