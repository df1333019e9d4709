//! Differential operators `sum g_i (d/dt)^i` over truncated series and over
//! the function field, determinant annihilators and the niceness test.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::chart::{Chart, Scalar};
use crate::error::{Error, Result};
use crate::funcfield::CurveFunction;
use crate::hyperelliptic::{CurveModel, DiskKind, ModelKind};
use crate::linalg::{det_bareiss, det_expand, pivot_columns_mod_p};
use crate::padics::{Prime, Valuation};
use crate::poly::{eval_mod_p, Poly};
use crate::rational::{binomial, factorial, Q};
use crate::scalar::Coeff;
use crate::series::TruncatedSeries;

/// `sum_i g_i (d/dt)^i` with series coefficients; `g_N != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialOperator<K: Coeff = Q> {
    coeffs: Vec<TruncatedSeries<K>>,
}

impl<K: Coeff> DifferentialOperator<K> {
    /// Drops vanishing top coefficients so that the order is tight.
    pub fn new(mut coeffs: Vec<TruncatedSeries<K>>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::DegenerateOperator("all coefficients vanish".into()));
        }
        Ok(DifferentialOperator { coeffs })
    }

    /// `(d/dt)^n` with coefficients known modulo `t^t_prec`.
    pub fn d_power(n: usize, t_prec: usize) -> Self {
        let mut coeffs = vec![TruncatedSeries::zero(t_prec); n];
        coeffs.push(TruncatedSeries::one(t_prec));
        DifferentialOperator { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[TruncatedSeries<K>] {
        &self.coeffs
    }

    pub fn leading(&self) -> &TruncatedSeries<K> {
        self.coeffs.last().expect("nonempty")
    }

    /// Precision of the coefficient expansions.
    pub fn precision(&self) -> usize {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(0)
    }

    /// `sum g_i F^(i)`; the result is known modulo `t^(T - N)` (or less if
    /// the coefficients are known to lower precision).
    pub fn apply(&self, f: &TruncatedSeries<K>) -> Result<TruncatedSeries<K>> {
        let n = self.order();
        if f.precision() <= n {
            return Err(Error::InsufficientPrecision(format!(
                "operator of order {n} applied to a series known modulo x^{}",
                f.precision()
            )));
        }
        let mut deriv = f.clone();
        let mut acc: Option<TruncatedSeries<K>> = None;
        for (i, g) in self.coeffs.iter().enumerate() {
            if i > 0 {
                deriv = deriv.derivative();
            }
            if g.is_zero() {
                continue;
            }
            let term = g * &deriv;
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        let target = (f.precision() - n).min(self.precision());
        Ok(acc.unwrap_or_else(|| TruncatedSeries::zero(target)).truncate(target))
    }

    /// Niceness at the disk `|t| < 1`: every coefficient p-integral and the
    /// leading coefficient a unit of `Z_p[[t]]`.
    pub fn check_nice(&self, p: Prime) -> NicenessCertificate {
        let mut integrality = i64::MAX;
        let mut failure = None;
        for (i, g) in self.coeffs.iter().enumerate() {
            if let Valuation::Finite(v) = g.min_valuation(p) {
                integrality = integrality.min(v);
                if v < 0 && failure.is_none() {
                    failure = Some(NicenessFailure { index: i, valuation: v, reason: "coefficient is not p-integral".into() });
                }
            }
        }
        let lead0 = self.leading().coeffs().first().map(|c| c.valuation(p)).unwrap_or(Valuation::Infinite);
        let unit = match lead0 {
            Valuation::Finite(v) => v,
            Valuation::Infinite => i64::MAX,
        };
        if failure.is_none() && unit != 0 {
            failure = Some(NicenessFailure {
                index: self.order(),
                valuation: unit,
                reason: "leading coefficient is not a unit".into(),
            });
        }
        NicenessCertificate { integrality_witness: integrality, unit_witness: unit, failure }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NicenessFailure {
    pub index: usize,
    pub valuation: i64,
    pub reason: String,
}

/// Outcome of the niceness test. `integrality_witness` is the least
/// coefficient valuation (must be >= 0) and `unit_witness` the valuation of
/// the leading coefficient's constant term (must be 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NicenessCertificate {
    pub integrality_witness: i64,
    pub unit_witness: i64,
    pub failure: Option<NicenessFailure>,
}

impl NicenessCertificate {
    pub fn is_nice(&self) -> bool {
        self.failure.is_none()
    }
}

fn check_index_set(s: &[usize]) -> Result<()> {
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!("index set {s:?} must be strictly increasing")));
    }
    Ok(())
}

fn inv_factorial<K: Coeff>(n: usize) -> K {
    K::from_rational(Q::new(BigInt::one(), factorial(n as u64)))
}

/// The `m x (m+1)` matrix with entries `(1/n_j!) F_i^(n_j)`, truncated to a
/// common precision `T - max S`.
pub fn annihilator_matrix<K: Coeff>(s: &[usize], fs: &[TruncatedSeries<K>]) -> Result<Vec<Vec<TruncatedSeries<K>>>> {
    check_index_set(s)?;
    if s.len() != fs.len() + 1 {
        return Err(Error::InvalidInput(format!("need |S| = m + 1, got |S| = {} for m = {}", s.len(), fs.len())));
    }
    let t = fs.iter().map(|f| f.precision()).min().unwrap_or(usize::MAX);
    let max_s = *s.last().expect("nonempty");
    if !fs.is_empty() && max_s >= t {
        return Err(Error::InsufficientPrecision(format!("max S = {max_s} needs series known beyond x^{t}")));
    }
    let common = t.saturating_sub(max_s);
    Ok(fs
        .iter()
        .map(|f| s.iter().map(|&n| f.derivative_n(n).scale(&inv_factorial::<K>(n)).truncate(common)).collect())
        .collect())
}

/// `D_S = sum_i (-1)^(i+1) (n_last!/n_i!) det(A^(i)) (d/dt)^(n_i)`.
pub fn build_annihilator<K: Coeff>(s: &[usize], fs: &[TruncatedSeries<K>]) -> Result<DifferentialOperator<K>> {
    let a = annihilator_matrix(s, fs)?;
    let m = fs.len();
    let t = fs.iter().map(|f| f.precision()).min().unwrap_or(1);
    let max_s = *s.last().expect("nonempty");
    let common = if m == 0 { t.max(1) } else { t - max_s };
    let mut coeffs = vec![TruncatedSeries::zero(common); max_s + 1];
    let top = factorial(max_s as u64);
    for (i, &n) in s.iter().enumerate() {
        let minor: TruncatedSeries<K> = if m == 0 {
            TruncatedSeries::one(common)
        } else {
            let rows: Vec<Vec<TruncatedSeries<K>>> =
                a.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e.clone()).collect()).collect();
            det_expand(&rows)
        };
        let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
        let scalar = sign * Q::new(top.clone(), factorial(n as u64));
        coeffs[n] = minor.scale(&K::from_rational(scalar));
    }
    DifferentialOperator::new(coeffs).map_err(|_| Error::DegenerateOperator("all minors vanish: inputs are dependent to this precision".into()))
}

/// Lexicographically least `S` whose operator is nice: the pivot columns of
/// `(C_j(F_i) mod p)` plus the next index after the last pivot.
pub fn search_nice_s<K: Coeff>(fs: &[TruncatedSeries<K>], p: Prime, n_max: usize) -> Result<Vec<usize>> {
    let rows: Vec<Vec<u64>> = fs
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .take(n_max)
                .map(|c| c.reduce(p).ok_or_else(|| Error::Domain("series coefficients must be p-integral".into())))
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<_>>()?;
    let pivots = pivot_columns_mod_p(&rows, p.get());
    if pivots.len() < fs.len() {
        return Err(Error::SearchExhausted(n_max));
    }
    let next = pivots.last().map_or(0, |&c| c + 1);
    let mut s = pivots;
    s.push(next);
    Ok(s)
}

/// `D_1 o (w d/dt)`, the composite with a base derivation `w d/dt`. The
/// base factor must be a unit for the composite to stay nice.
pub fn compose_with_base<K: Coeff>(d1: &DifferentialOperator<K>, w: &TruncatedSeries<K>, p: Prime) -> Result<DifferentialOperator<K>> {
    match w.coeffs().first().map(|c| c.valuation(p)) {
        Some(Valuation::Finite(0)) => {}
        _ => {
            return Err(Error::NonUnit);
        }
    }
    let n = d1.order();
    let t = d1.precision().min(w.precision()).saturating_sub(n);
    let mut out = vec![TruncatedSeries::zero(t); n + 2];
    let mut wd = w.clone();
    let mut derivs = vec![wd.clone()];
    for _ in 0..n {
        wd = wd.derivative();
        derivs.push(wd.clone());
    }
    for (i, g) in d1.coeffs().iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        for (k, wk) in derivs.iter().enumerate().take(i + 1) {
            let c = K::from_rational(Q::from_integer(binomial(i as u64, k as u64)));
            let term = (g * wk).scale(&c).truncate(t);
            let idx = i - k + 1;
            out[idx] = &out[idx] + &term;
        }
    }
    DifferentialOperator::new(out)
}

/// Which derivation an algebraic operator is a polynomial in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BaseDerivation {
    /// `d/dx`
    DDx,
    /// `d/omega_0 = y d/dx`
    DOmega0,
}

impl BaseDerivation {
    pub fn apply(&self, f: &CurveFunction) -> CurveFunction {
        match self {
            BaseDerivation::DDx => f.d_dx(),
            BaseDerivation::DOmega0 => f.d_by_omega0(),
        }
    }

    /// `omega / (dual form)`: the function `F` with `d(int omega) = F * dual`
    /// for a differential given by its dx-quotient.
    pub fn quotient_of(&self, dx_quotient: &CurveFunction) -> CurveFunction {
        match self {
            BaseDerivation::DDx => dx_quotient.clone(),
            BaseDerivation::DOmega0 => dx_quotient.mul(&CurveFunction::y(dx_quotient.curve_poly())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaseDerivation::DDx => "d/dx",
            BaseDerivation::DOmega0 => "d/omega_0",
        }
    }
}

/// `sum_i g_i D^i` with function-field coefficients and `D` a global
/// derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicOperator {
    coeffs: Vec<CurveFunction>,
    base: BaseDerivation,
}

impl AlgebraicOperator {
    pub fn new(mut coeffs: Vec<CurveFunction>, base: BaseDerivation) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::DegenerateOperator("all coefficients vanish".into()));
        }
        Ok(AlgebraicOperator { coeffs, base })
    }

    /// `D^n`.
    pub fn power(curve: &CurveModel, n: usize, base: BaseDerivation) -> Self {
        let f = std::sync::Arc::new(curve.f().clone());
        let mut coeffs = vec![CurveFunction::zero(&f); n];
        coeffs.push(CurveFunction::one(&f));
        AlgebraicOperator { coeffs, base }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CurveFunction] {
        &self.coeffs
    }

    pub fn base(&self) -> BaseDerivation {
        self.base
    }

    pub fn apply(&self, f: &CurveFunction) -> CurveFunction {
        let mut d = f.clone();
        let mut acc = CurveFunction::zero(f.curve_poly());
        for (i, g) in self.coeffs.iter().enumerate() {
            if i > 0 {
                d = self.base.apply(&d);
            }
            if !g.is_zero() {
                acc = acc.add(&g.mul(&d));
            }
        }
        acc
    }

    /// Series operator in `d/dt` on a chart, with coefficients known modulo
    /// `t^t_prec`.
    pub fn localize(&self, chart: &Chart, t_prec: usize) -> Result<DifferentialOperator<Scalar>> {
        let n = self.order();
        let work = t_prec + n;
        let w = base_factor(self.base, chart, work)?;
        // powers L_k of (w d/dt) as coefficient vectors
        let mut lk: Vec<TruncatedSeries<Scalar>> = vec![TruncatedSeries::one(work)];
        let mut total: Vec<TruncatedSeries<Scalar>> = vec![TruncatedSeries::zero(work); n + 1];
        for (k, g) in self.coeffs.iter().enumerate() {
            if k > 0 {
                let mut next = vec![TruncatedSeries::zero(work); lk.len() + 1];
                for (j, c) in lk.iter().enumerate() {
                    let dc = c.derivative();
                    next[j] = &next[j] + &(&w * &dc);
                    next[j + 1] = &next[j + 1] + &(&w * c);
                }
                lk = next;
            }
            if g.is_zero() {
                continue;
            }
            let gs = chart.expand(g, work)?;
            for (j, c) in lk.iter().enumerate() {
                total[j] = &total[j] + &(&gs * c);
            }
        }
        let coeffs = total.into_iter().map(|c| c.truncate(t_prec)).collect();
        DifferentialOperator::new(coeffs)
    }
}

/// `w` with `D = w d/dt` on the chart.
pub fn base_factor(base: BaseDerivation, chart: &Chart, t_prec: usize) -> Result<TruncatedSeries<Scalar>> {
    match base {
        BaseDerivation::DDx => chart.dxdt().inverse()?.to_series(t_prec),
        BaseDerivation::DOmega0 => chart.omega0_factor(t_prec),
    }
}

/// Index set of the Weierstrass-disk operator: even derivative orders
/// `0, 2, ..., 2(r-1)` followed by `2r - 1`, for `r` functions.
pub fn weierstrass_index_set(r: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..r).map(|i| 2 * i).collect();
    s.push(2 * r - 1);
    s
}

/// The operator annihilating `x^j` (`0 <= j < r`, `r = 2g+1` for even models
/// and `2g` for odd ones) built from `(1/n!) (d/omega_0)^n x^j` over the
/// index set [`weierstrass_index_set`], together with `det B`.
#[derive(Debug, Clone)]
pub struct WeierstrassAnnihilator {
    pub operator: AlgebraicOperator,
    pub index_set: Vec<usize>,
    /// `det((1/(2i)!) (d/omega_0)^(2i) x^j)_{0 <= i, j < r}`, a polynomial in x.
    pub det_b: Poly,
}

/// `(d/omega_0)^n x^j` as `(even part, y part)` polynomials.
fn omega0_derivatives(curve: &CurveModel, j: usize, n_max: usize) -> Result<Vec<CurveFunction>> {
    let f = std::sync::Arc::new(curve.f().clone());
    let mut cur = CurveFunction::from_poly(&f, Poly::monomial(j, Q::one()));
    let mut out = vec![cur.clone()];
    for _ in 0..n_max {
        cur = cur.d_by_omega0();
        out.push(cur.clone());
    }
    Ok(out)
}

fn poly_part(f: &CurveFunction, odd: bool) -> Result<Poly> {
    let (part, other) = if odd { (f.b(), f.a()) } else { (f.a(), f.b()) };
    if !other.is_zero() || !part.den().is_constant() {
        return Err(Error::InternalContradiction(format!("unexpected shape of (d/omega_0)^n x^j: {f}")));
    }
    Ok(part.num().scale(&part.den().leading().recip()))
}

pub fn weierstrass_annihilator(curve: &CurveModel) -> Result<WeierstrassAnnihilator> {
    let g = curve.genus();
    let r = match curve.kind() {
        ModelKind::Even => 2 * g + 1,
        ModelKind::Odd => 2 * g,
    };
    let s = weierstrass_index_set(r);
    let n_max = *s.last().expect("nonempty");
    let f = std::sync::Arc::new(curve.f().clone());
    // m[k][c] = (1/n_c!) (d/omega_0)^(n_c) x^k; the last column is y times a polynomial
    let mut m: Vec<Vec<Poly>> = Vec::with_capacity(r);
    for k in 0..r {
        let ders = omega0_derivatives(curve, k, n_max)?;
        let row = s
            .iter()
            .enumerate()
            .map(|(c, &n)| Ok(poly_part(&ders[n], c == r)?.scale(&Q::new(BigInt::one(), factorial(n as u64)))))
            .collect::<Result<Vec<Poly>>>()?;
        m.push(row);
    }
    let top = factorial(n_max as u64);
    let mut coeffs = vec![CurveFunction::zero(&f); n_max + 1];
    let mut det_b = Poly::zero();
    for (i, &n) in s.iter().enumerate() {
        let rows: Vec<Vec<Poly>> = m.iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, e)| e.clone()).collect()).collect();
        let det = det_bareiss(rows);
        let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
        let scaled = det.scale(&(sign * Q::new(top.clone(), factorial(n as u64))));
        coeffs[n] = if i == r {
            det_b = det.clone();
            CurveFunction::from_poly(&f, scaled)
        } else {
            // the minor keeps the odd column, so it carries one factor of y
            CurveFunction::new(&f, crate::funcfield::RatFunc::zero(), crate::funcfield::RatFunc::from_poly(scaled))
        };
    }
    let operator = AlgebraicOperator::new(coeffs, BaseDerivation::DOmega0)?;
    Ok(WeierstrassAnnihilator { operator, index_set: s, det_b })
}

impl WeierstrassAnnihilator {
    /// Checks that `det B` is a unit at every Weierstrass disk of the
    /// reduction; returns the residues `det B(x) mod p` per root.
    pub fn det_b_units(&self, curve: &CurveModel, p: Prime) -> Result<Vec<(u64, u64)>> {
        let reduced = self
            .det_b
            .reduce(p)
            .ok_or_else(|| Error::InternalContradiction(format!("det B has a denominator divisible by {p}")))?;
        let mut out = Vec::new();
        for disk in curve.residue_disks(p)? {
            if disk.kind != DiskKind::AffineWeierstrass {
                continue;
            }
            let (x, _) = disk.affine().expect("affine");
            let v = eval_mod_p(&reduced, x, p.get());
            if v == 0 {
                return Err(Error::InternalContradiction(format!("det B vanishes mod {p} at the Weierstrass point x = {x}")));
            }
            out.push((x, v));
        }
        Ok(out)
    }
}

/// True if every coefficient of the series is zero.
pub fn is_zero_series<K: Coeff>(s: &TruncatedSeries<K>) -> bool {
    s.coeffs().iter().all(|c| c.is_zero())
}
