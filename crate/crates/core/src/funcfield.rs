//! The function field `Q(x)[y]/(y^2 - f)` of a hyperelliptic model: exact
//! arithmetic, the derivations `d/dx` and `d/omega_0`, and pole ledgers.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperelliptic::{CurveModel, ModelKind};
use crate::poly::Poly;
use crate::rational::Q;
use crate::scalar::Coeff;
use crate::series::LaurentSeries;

pub use crate::chart::{expand_at, expand_laurent_at, Chart, ChartCenter, Scalar};

/// A rational function `num/den` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        if den.is_constant() {
            let c = den.leading().recip();
            return Ok(RatFunc { num: num.scale(&c), den: Poly::one() });
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).expect("gcd divides");
        let den = den.exact_div(&g).expect("gcd divides");
        let lc = den.leading();
        Ok(RatFunc { num: num.scale(&lc.recip()), den: den.monic() })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn constant(c: Q) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg num - deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.num.deg_i64() - self.den.deg_i64())
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).expect("nonzero den");
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).expect("nonzero den")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero den")
    }

    pub fn scale(&self, c: &Q) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        self.mul(&RatFunc::from_poly(p.clone()))
    }

    pub fn inverse(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).expect("nonzero den")
    }

    pub fn eval_laurent<K: Coeff>(&self, x: &LaurentSeries<K>) -> Result<LaurentSeries<K>> {
        let n = self.num.eval_laurent(x);
        if self.den.is_constant() {
            return Ok(n.scale(&K::from_rational(self.den.leading().recip())));
        }
        Ok(n.mul(&self.den.eval_laurent(x).inverse()?))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// `a(x) + b(x) y` on `y^2 = f(x)`.
#[derive(Clone, PartialEq, Eq)]
pub struct CurveFunction {
    a: RatFunc,
    b: RatFunc,
    f: Arc<Poly>,
}

impl CurveFunction {
    pub fn new(f: &Arc<Poly>, a: RatFunc, b: RatFunc) -> Self {
        CurveFunction { a, b, f: f.clone() }
    }

    pub fn from_poly(f: &Arc<Poly>, p: Poly) -> Self {
        CurveFunction::new(f, RatFunc::from_poly(p), RatFunc::zero())
    }

    pub fn constant(f: &Arc<Poly>, c: Q) -> Self {
        CurveFunction::from_poly(f, Poly::constant(c))
    }

    pub fn zero(f: &Arc<Poly>) -> Self {
        CurveFunction::from_poly(f, Poly::zero())
    }

    pub fn one(f: &Arc<Poly>) -> Self {
        CurveFunction::constant(f, Q::one())
    }

    pub fn x(f: &Arc<Poly>) -> Self {
        CurveFunction::from_poly(f, Poly::x())
    }

    pub fn y(f: &Arc<Poly>) -> Self {
        CurveFunction::new(f, RatFunc::zero(), RatFunc::from_poly(Poly::one()))
    }

    /// `x^j / y`, the dx-quotient of `x^j dx/y`.
    pub fn x_pow_over_y(f: &Arc<Poly>, j: usize) -> Self {
        let b = RatFunc::new(Poly::monomial(j, Q::one()), (**f).clone()).expect("f nonzero");
        CurveFunction::new(f, RatFunc::zero(), b)
    }

    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn curve_poly(&self) -> &Arc<Poly> {
        &self.f
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        CurveFunction { a: self.a.add(&o.a), b: self.b.add(&o.b), f: self.f.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CurveFunction { a: self.a.sub(&o.a), b: self.b.sub(&o.b), f: self.f.clone() }
    }

    pub fn neg(&self) -> Self {
        CurveFunction { a: self.a.neg(), b: self.b.neg(), f: self.f.clone() }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return CurveFunction::zero(&self.f);
        }
        CurveFunction { a: self.a.scale(c), b: self.b.scale(c), f: self.f.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let bb = self.b.mul(&o.b).mul_poly(&self.f);
        CurveFunction {
            a: self.a.mul(&o.a).add(&bb),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.a)),
            f: self.f.clone(),
        }
    }

    /// The hyperelliptic involution `y -> -y`.
    pub fn involution(&self) -> Self {
        CurveFunction { a: self.a.clone(), b: self.b.neg(), f: self.f.clone() }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // (a + b y)^{-1} = (a - b y) / (a^2 - b^2 f)
        let norm = self.a.mul(&self.a).sub(&self.b.mul(&self.b).mul_poly(&self.f));
        let ninv = norm.inverse()?;
        Ok(CurveFunction { a: self.a.mul(&ninv), b: self.b.neg().mul(&ninv), f: self.f.clone() })
    }

    /// `d/dx` with `dy/dx = f'/(2y)`.
    pub fn d_dx(&self) -> Self {
        let fp = self.f.derivative();
        let half = RatFunc::new(fp, self.f.scale(&Q::from_integer(2.into()))).expect("f nonzero");
        CurveFunction {
            a: self.a.derivative(),
            b: self.b.derivative().add(&self.b.mul(&half)),
            f: self.f.clone(),
        }
    }

    /// `d/omega_0 = y d/dx`.
    pub fn d_by_omega0(&self) -> Self {
        let d = self.d_dx();
        CurveFunction { a: d.b.mul_poly(&self.f), b: d.a, f: self.f.clone() }
    }

    /// Laurent expansion in the chart's local parameter.
    pub fn expand_laurent(&self, chart: &Chart) -> Result<LaurentSeries<Scalar>> {
        let a = self.a.eval_laurent(chart.x())?;
        if self.b.is_zero() {
            return Ok(a);
        }
        let b = self.b.eval_laurent(chart.x())?;
        Ok(a.add(&b.mul(chart.y())))
    }

    /// Pole ledger `(n_inf, m_W, extra)` read off degrees and denominators.
    pub fn ledger(&self, kind: ModelKind, genus: usize) -> Option<PoleLedger> {
        if self.is_zero() {
            return None;
        }
        let g = genus as i64;
        let inf_a = self.a.degree().map(|d| match kind {
            ModelKind::Even => d,
            ModelKind::Odd => 2 * d,
        });
        let inf_b = self.b.degree().map(|d| match kind {
            ModelKind::Even => d + g + 1,
            ModelKind::Odd => 2 * d + 2 * g + 1,
        });
        let n_inf = inf_a.into_iter().chain(inf_b).max().expect("nonzero");
        let mult_a = (!self.a.is_zero()).then(|| 2 * self.a.den.max_root_multiplicity_in(&self.f) as i64);
        let mult_b = (!self.b.is_zero()).then(|| 2 * self.b.den.max_root_multiplicity_in(&self.f) as i64 - 1);
        let m_w = mult_a.into_iter().chain(mult_b).max().unwrap_or(0).max(0);
        let extra = [&self.a, &self.b]
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| off_weierstrass_multiplicity(&r.den, &self.f))
            .max()
            .unwrap_or(0);
        Some(PoleLedger { n_inf, m_w, extra })
    }

    pub fn ledger_on(&self, curve: &CurveModel) -> Option<PoleLedger> {
        self.ledger(curve.kind(), curve.genus())
    }
}

/// Largest multiplicity of a root of `den` that is not a root of `f`.
fn off_weierstrass_multiplicity(den: &Poly, f: &Poly) -> i64 {
    let mut cur = den.clone();
    let mut h = cur.gcd(f);
    while !h.is_constant() {
        cur = cur.exact_div(&h).expect("gcd divides");
        h = cur.gcd(&h);
    }
    let mut e = 0;
    while !cur.is_constant() {
        e += 1;
        cur = cur.gcd(&cur.derivative());
    }
    e
}

impl fmt::Debug for CurveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CurveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*y", self.b),
            (false, false) => write!(f, "{} + ({})*y", self.a, self.b),
        }
    }
}

/// Membership claim `F in H^0(O(n_inf * inf + m_w * W + extra * D))`. For
/// even models `inf` is the degree-two divisor of both points at infinity;
/// `D` is the reduced divisor of affine non-Weierstrass poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PoleLedger {
    pub n_inf: i64,
    pub m_w: i64,
    pub extra: i64,
}

impl PoleLedger {
    pub fn new(n_inf: i64, m_w: i64) -> Self {
        PoleLedger { n_inf, m_w, extra: 0 }
    }

    /// True if this ledger's space is contained in `other`'s.
    pub fn within(&self, other: &PoleLedger) -> bool {
        self.n_inf <= other.n_inf && self.m_w <= other.m_w && self.extra <= other.extra
    }

    /// Degree of the divisor, with `inf` of degree 2 on even models.
    pub fn degree(&self, kind: ModelKind, genus: usize) -> i64 {
        let (inf_deg, w_deg) = match kind {
            ModelKind::Even => (2, 2 * genus as i64 + 2),
            ModelKind::Odd => (1, 2 * genus as i64 + 1),
        };
        self.n_inf * inf_deg + self.m_w * w_deg
    }
}

/// Ledger for `dF/dx` given one for `F` (`div dx = W - 2 inf` on even
/// models, `W - 3 inf` on odd ones).
pub fn ledger_derivative(l: PoleLedger, kind: ModelKind) -> PoleLedger {
    let drop = match kind {
        ModelKind::Even => 1,
        ModelKind::Odd => 2,
    };
    let m_w = if l.m_w > 0 { l.m_w + 2 } else { 1 };
    // a pole of order e at an affine non-Weierstrass point becomes e + 1
    let extra = if l.extra > 0 { l.extra + 1 } else { 0 };
    PoleLedger { n_inf: l.n_inf - drop, m_w, extra }
}

/// Iterates [`ledger_derivative`] `j` times.
pub fn ledger_derivative_n(l: PoleLedger, kind: ModelKind, j: usize) -> PoleLedger {
    (0..j).fold(l, |acc, _| ledger_derivative(acc, kind))
}

/// Divisor bound for `d^j F/dx^j` when `F in H^0(O(D))`, `D = sum n_i P_i`,
/// and `div dx = W - W'` with `W = sum m_i Q_i`: the coefficients on the
/// `Q_i` are `j m_i + (j - 1)` and on the `P_i` are `n_i + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeDivisor {
    pub on_w: Vec<i64>,
    pub on_d: Vec<i64>,
}

impl DerivativeDivisor {
    pub fn degree(&self) -> i64 {
        self.on_w.iter().sum::<i64>() + self.on_d.iter().sum::<i64>()
    }
}

pub fn ledger_general_derivative(w_mults: &[i64], d_mults: &[i64], j: i64) -> DerivativeDivisor {
    if j <= 0 {
        return DerivativeDivisor { on_w: vec![0; w_mults.len()], on_d: d_mults.to_vec() };
    }
    DerivativeDivisor {
        on_w: w_mults.iter().map(|m| j * m + (j - 1)).collect(),
        on_d: d_mults.iter().map(|n| n + j).collect(),
    }
}

/// The coarser form `(2j - 1) W + (j + 1) D` of the same bound.
pub fn ledger_general_derivative_coarse(w_mults: &[i64], d_mults: &[i64], j: i64) -> DerivativeDivisor {
    if j <= 0 {
        return DerivativeDivisor { on_w: vec![0; w_mults.len()], on_d: d_mults.to_vec() };
    }
    DerivativeDivisor {
        on_w: w_mults.iter().map(|m| (2 * j - 1) * m).collect(),
        on_d: d_mults.iter().map(|n| (j + 1) * n).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn curve(c: &[i64]) -> Arc<Poly> {
        Arc::new(Poly::from_ints(c))
    }

    #[test]
    fn field_operations() {
        let f = curve(&[1, 1, 0, 1]);
        let y = CurveFunction::y(&f);
        assert_eq!(y.mul(&y), CurveFunction::from_poly(&f, (*f).clone()));
        let x = CurveFunction::x(&f);
        assert_eq!(x.add(&y).involution(), x.sub(&y));
        let inv = y.inverse().unwrap();
        assert_eq!(inv, CurveFunction::x_pow_over_y(&f, 0));
        assert_eq!(inv.mul(&y), CurveFunction::one(&f));
        let z = x.add(&y).add(&CurveFunction::constant(&f, q(3)));
        assert_eq!(z.mul(&z.inverse().unwrap()), CurveFunction::one(&f));
        assert_eq!(CurveFunction::zero(&f).inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn derivations() {
        let f = curve(&[1, 1, 0, 1]);
        let y = CurveFunction::y(&f);
        let fp = RatFunc::new(f.derivative(), f.scale(&q(2))).unwrap();
        assert_eq!(y.d_dx(), CurveFunction::new(&f, RatFunc::zero(), fp));
        let x = CurveFunction::x(&f);
        assert_eq!(x.d_by_omega0(), y);
        let half_fp = CurveFunction::from_poly(&f, f.derivative().scale(&qf(1, 2)));
        assert_eq!(x.d_by_omega0().d_by_omega0(), half_fp);
        assert!(CurveFunction::constant(&f, q(7)).d_by_omega0().is_zero());
        // x/y: 1/y - x f'/(2 y^3)
        let xy = CurveFunction::x_pow_over_y(&f, 1);
        let expect = CurveFunction::x_pow_over_y(&f, 0).sub(&x.mul(&half_fp).mul(&y.inverse().unwrap().mul(&y.inverse().unwrap()).mul(&y.inverse().unwrap())));
        assert_eq!(xy.d_dx(), expect);
    }

    #[test]
    fn leibniz_rule() {
        let f = curve(&[3, 0, -2, 0, 1, 0, 1]);
        let u = CurveFunction::x(&f).add(&CurveFunction::y(&f));
        let v = CurveFunction::x_pow_over_y(&f, 2).add(&CurveFunction::constant(&f, q(5)));
        let lhs = u.mul(&v).d_dx();
        let rhs = u.d_dx().mul(&v).add(&u.mul(&v.d_dx()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ledgers() {
        let f = curve(&[3, 0, -2, 0, 1, 0, 1]);
        for j in 0..5 {
            let l = CurveFunction::x_pow_over_y(&f, j).ledger(ModelKind::Even, 2).unwrap();
            assert_eq!(l, PoleLedger::new(j as i64 - 3, 1));
        }
        let y = CurveFunction::y(&f).ledger(ModelKind::Even, 2).unwrap();
        assert_eq!(y, PoleLedger::new(3, 0));
        let fo = curve(&[1, 0, 0, 0, 0, 1]);
        assert_eq!(CurveFunction::x(&fo).ledger(ModelKind::Odd, 2).unwrap(), PoleLedger::new(2, 0));
        assert_eq!(CurveFunction::zero(&fo).ledger(ModelKind::Odd, 2), None);
        let r = CurveFunction::from_poly(&fo, Poly::one()).scale(&q(2));
        let off = CurveFunction::new(&fo, RatFunc::new(Poly::one(), Poly::from_ints(&[-3, 1]).pow(2)).unwrap(), RatFunc::zero());
        assert_eq!(off.mul(&r).ledger(ModelKind::Odd, 2).unwrap().extra, 2);
    }

    #[test]
    fn ledger_derivative_rules() {
        assert_eq!(ledger_derivative(PoleLedger::new(4, 0), ModelKind::Even), PoleLedger::new(3, 1));
        assert_eq!(ledger_derivative(PoleLedger::new(4, 3), ModelKind::Even), PoleLedger::new(3, 5));
        assert_eq!(ledger_derivative(PoleLedger::new(4, 0), ModelKind::Odd), PoleLedger::new(2, 1));
        // (d/dx)^k (x^j/y) on an odd model: (2k+1) W + (2j - 2k - 2g - 1) inf
        let g = 2;
        for j in 0..4i64 {
            for k in 0..5i64 {
                let l = ledger_derivative_n(PoleLedger::new(2 * j - 2 * g - 1, 1), ModelKind::Odd, k as usize);
                assert_eq!(l, PoleLedger::new(2 * j - 2 * k - 2 * g - 1, 2 * k + 1));
            }
        }
    }

    #[test]
    fn general_derivative_forms() {
        let fine = ledger_general_derivative(&[1, 1], &[2], 3);
        assert_eq!(fine, DerivativeDivisor { on_w: vec![5, 5], on_d: vec![5] });
        let coarse = ledger_general_derivative_coarse(&[1, 1], &[2], 3);
        assert_eq!(coarse, DerivativeDivisor { on_w: vec![5, 5], on_d: vec![8] });
        assert_eq!(ledger_general_derivative(&[1], &[2], 0).on_d, vec![2]);
    }
}
