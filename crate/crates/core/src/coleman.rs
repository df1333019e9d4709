//! Residue-disk expansions of single and iterated integrals, the function
//! `G = sum a_ij int w_i w_j + sum a_i int w_i + int eta + h`, its image
//! under the disk operators, and the per-disk pipeline.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{degree_ledger, per_disk_bound, LedgerCase};
use crate::chart::{Chart, Scalar};
use crate::diffops::{compose_with_base, weierstrass_annihilator, AlgebraicOperator, BaseDerivation, NicenessCertificate};
use crate::error::{Error, Result};
use crate::funcfield::{CurveFunction, PoleLedger, RatFunc};
use crate::hyperelliptic::{CurveModel, DiskDescriptor, DiskKind, ModelKind};
use crate::padics::{valuation, Prime, Valuation};
use crate::poly::Poly;
use crate::rational::{binomial, parse_rational, Q};
use crate::series::{min_valuation_index, TruncatedSeries, ValuationFloor};

/// Path constants for one disk: values at the chart center of the single
/// integrals, the iterated integrals and the integral of `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskConstants {
    pub single: Vec<Q>,
    pub double: Vec<Vec<Q>>,
    pub eta: Q,
}

/// The data defining `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColemanSpec {
    pub curve: CurveModel,
    pub p: Option<u64>,
    pub precision: Option<usize>,
    /// dx-quotients `f_i = omega_i / dx`.
    pub basis: Vec<CurveFunction>,
    pub a_matrix: Vec<Vec<Q>>,
    pub a_vector: Vec<Q>,
    pub eta: Option<CurveFunction>,
    pub h: CurveFunction,
    /// Default values of the single integrals at disk centers.
    pub base_constants: Vec<Q>,
    /// Overrides keyed by the disk label, e.g. `"(0, 1)"`.
    pub disk_constants: BTreeMap<String, DiskConstants>,
}

/// `x^i/y` for `0 <= i < n`, with `n = 2g+1` on even models and `2g` on odd
/// ones.
pub fn default_basis(curve: &CurveModel) -> Vec<CurveFunction> {
    let f = Arc::new(curve.f().clone());
    let g = curve.genus();
    let n = match curve.kind() {
        ModelKind::Even => 2 * g + 1,
        ModelKind::Odd => 2 * g,
    };
    (0..n).map(|i| CurveFunction::x_pow_over_y(&f, i)).collect()
}

impl ColemanSpec {
    /// All coefficients zero, default basis, `h = 0`.
    pub fn zero(curve: CurveModel) -> Self {
        let basis = default_basis(&curve);
        let n = basis.len();
        let f = Arc::new(curve.f().clone());
        ColemanSpec {
            p: None,
            precision: None,
            a_matrix: vec![vec![Q::zero(); n]; n],
            a_vector: vec![Q::zero(); n],
            eta: None,
            h: CurveFunction::zero(&f),
            base_constants: vec![Q::zero(); n],
            disk_constants: BTreeMap::new(),
            basis,
            curve,
        }
    }

    /// `G = int w_0 w_1 + a int w_0 w_0 + b` on `y^2 = x^3 + ...`.
    pub fn elliptic(curve: CurveModel, a: Q, b: Q) -> Result<Self> {
        if curve.genus() != 1 || curve.kind() != ModelKind::Odd {
            return Err(Error::InvalidInput("the elliptic spec needs an odd genus-1 model".into()));
        }
        let mut spec = ColemanSpec::zero(curve);
        spec.a_matrix[0][0] = a;
        spec.a_matrix[0][1] = Q::one();
        spec.h = CurveFunction::constant(spec.h.curve_poly(), b);
        Ok(spec)
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.curve.genus();
        let n = self.basis.len();
        let ok_size = match self.curve.kind() {
            ModelKind::Even => n == 2 * g || n == 2 * g + 1,
            ModelKind::Odd => n == 2 * g,
        };
        if !ok_size {
            return Err(Error::InvalidInput(format!("basis of size {n} does not fit a {} model of genus {g}", self.curve.kind())));
        }
        if self.a_matrix.len() != n || self.a_matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("a_matrix must be {n} x {n}")));
        }
        if self.a_vector.len() != n || self.base_constants.len() != n {
            return Err(Error::InvalidInput(format!("a_vector and base_constants must have length {n}")));
        }
        for (label, c) in &self.disk_constants {
            if c.single.len() != n || c.double.len() != n || c.double.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("constants for disk {label} have the wrong shape")));
            }
        }
        if !self.h.is_zero() {
            let allowed = match self.curve.kind() {
                ModelKind::Even => PoleLedger::new(2 * g as i64 + 2, 0),
                ModelKind::Odd => PoleLedger::new(4 * g as i64, 0),
            };
            let l = self.h.ledger_on(&self.curve).expect("nonzero");
            if !l.within(&allowed) {
                return Err(Error::InvalidInput(format!(
                    "h has poles ({} at infinity, {} on W, {} elsewhere) outside the allowed space ({} at infinity)",
                    l.n_inf, l.m_w, l.extra, allowed.n_inf
                )));
            }
        }
        Ok(())
    }

    pub fn constants_for(&self, disk: &DiskDescriptor) -> DiskConstants {
        self.disk_constants.get(&disk.to_string()).cloned().unwrap_or_else(|| {
            let n = self.basis.len();
            DiskConstants { single: self.base_constants.clone(), double: vec![vec![Q::zero(); n]; n], eta: Q::zero() }
        })
    }

    /// Least valuation among the scalar inputs, capped at 0.
    pub fn valuation_floor(&self, p: Prime) -> i64 {
        let mut all: Vec<&Q> = self.a_matrix.iter().flatten().chain(&self.a_vector).chain(&self.base_constants).collect();
        for c in self.disk_constants.values() {
            all.extend(c.single.iter().chain(c.double.iter().flatten()).chain(std::iter::once(&c.eta)));
        }
        all.into_iter()
            .filter_map(|r| match valuation(r, p) {
                Valuation::Finite(v) => Some(v),
                Valuation::Infinite => None,
            })
            .min()
            .unwrap_or(0)
            .min(0)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::InvalidInput(format!("spec file: {e}")))?;
        file.into_spec()
    }

    pub fn to_toml(&self) -> String {
        let file = SpecFile::from_spec(self);
        toml::to_string(&file).expect("spec serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Int(i64),
    Text(String),
}

impl RationalRepr {
    fn parse(&self) -> Result<Q> {
        match self {
            RationalRepr::Int(n) => Ok(Q::from_integer((*n).into())),
            RationalRepr::Text(s) => parse_rational(s),
        }
    }

    fn from_q(q: &Q) -> Self {
        RationalRepr::Text(q.to_string())
    }
}

fn parse_list(v: &[RationalRepr]) -> Result<Vec<Q>> {
    v.iter().map(RationalRepr::parse).collect()
}

fn repr_list(v: &[Q]) -> Vec<RationalRepr> {
    v.iter().map(RationalRepr::from_q).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RatFuncRepr {
    Poly(Vec<RationalRepr>),
    Fraction { num: Vec<RationalRepr>, den: Vec<RationalRepr> },
}

impl RatFuncRepr {
    fn parse(&self) -> Result<RatFunc> {
        match self {
            RatFuncRepr::Poly(c) => Ok(RatFunc::from_poly(Poly::new(parse_list(c)?))),
            RatFuncRepr::Fraction { num, den } => RatFunc::new(Poly::new(parse_list(num)?), Poly::new(parse_list(den)?)),
        }
    }

    fn from_ratfunc(r: &RatFunc) -> Self {
        if r.den().is_one_poly() {
            RatFuncRepr::Poly(repr_list(r.num().coeffs()))
        } else {
            RatFuncRepr::Fraction { num: repr_list(r.num().coeffs()), den: repr_list(r.den().coeffs()) }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<RatFuncRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<RatFuncRepr>,
}

impl FunctionRepr {
    fn parse(&self, f: &Arc<Poly>) -> Result<CurveFunction> {
        let a = self.a.as_ref().map(RatFuncRepr::parse).transpose()?.unwrap_or_else(RatFunc::zero);
        let b = self.b.as_ref().map(RatFuncRepr::parse).transpose()?.unwrap_or_else(RatFunc::zero);
        Ok(CurveFunction::new(f, a, b))
    }

    fn from_function(c: &CurveFunction) -> Self {
        FunctionRepr {
            a: (!c.a().is_zero()).then(|| RatFuncRepr::from_ratfunc(c.a())),
            b: (!c.b().is_zero()).then(|| RatFuncRepr::from_ratfunc(c.b())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiskConstantsRepr {
    center: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    single: Option<Vec<RationalRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    double: Option<Vec<Vec<RationalRepr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<RationalRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    curve: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    precision: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a_matrix: Option<Vec<Vec<RationalRepr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a_vector: Option<Vec<RationalRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_constants: Option<Vec<RationalRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<FunctionRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<FunctionRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<FunctionRepr>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    disk: Vec<DiskConstantsRepr>,
}

impl SpecFile {
    fn into_spec(self) -> Result<ColemanSpec> {
        let curve = CurveModel::parse_line(&self.curve)?;
        let mut spec = ColemanSpec::zero(curve);
        let f = spec.h.curve_poly().clone();
        spec.p = self.p;
        spec.precision = self.precision;
        if let Some(b) = &self.basis {
            spec.basis = b.iter().map(|r| r.parse(&f)).collect::<Result<_>>()?;
        }
        let n = spec.basis.len();
        spec.a_matrix = match &self.a_matrix {
            Some(m) => m.iter().map(|r| parse_list(r)).collect::<Result<_>>()?,
            None => vec![vec![Q::zero(); n]; n],
        };
        spec.a_vector = match &self.a_vector {
            Some(v) => parse_list(v)?,
            None => vec![Q::zero(); n],
        };
        spec.base_constants = match &self.base_constants {
            Some(v) => parse_list(v)?,
            None => vec![Q::zero(); n],
        };
        if let Some(h) = &self.h {
            spec.h = h.parse(&f)?;
        }
        spec.eta = self.eta.as_ref().map(|e| e.parse(&f)).transpose()?;
        for d in &self.disk {
            let c = DiskConstants {
                single: match &d.single {
                    Some(v) => parse_list(v)?,
                    None => spec.base_constants.clone(),
                },
                double: match &d.double {
                    Some(m) => m.iter().map(|r| parse_list(r)).collect::<Result<_>>()?,
                    None => vec![vec![Q::zero(); n]; n],
                },
                eta: d.eta.as_ref().map(RationalRepr::parse).transpose()?.unwrap_or_else(Q::zero),
            };
            spec.disk_constants.insert(d.center.trim().to_string(), c);
        }
        spec.validate()?;
        Ok(spec)
    }

    fn from_spec(s: &ColemanSpec) -> Self {
        SpecFile {
            curve: s.curve.to_line(),
            p: s.p,
            precision: s.precision,
            a_matrix: Some(s.a_matrix.iter().map(|r| repr_list(r)).collect()),
            a_vector: Some(repr_list(&s.a_vector)),
            base_constants: Some(repr_list(&s.base_constants)),
            h: (!s.h.is_zero()).then(|| FunctionRepr::from_function(&s.h)),
            eta: s.eta.as_ref().map(FunctionRepr::from_function),
            basis: Some(s.basis.iter().map(FunctionRepr::from_function).collect()),
            disk: s
                .disk_constants
                .iter()
                .map(|(k, c)| DiskConstantsRepr {
                    center: k.clone(),
                    single: Some(repr_list(&c.single)),
                    double: Some(c.double.iter().map(|r| repr_list(r)).collect()),
                    eta: Some(RationalRepr::from_q(&c.eta)),
                })
                .collect(),
        }
    }
}

trait PolyExt {
    fn is_one_poly(&self) -> bool;
}

impl PolyExt for Poly {
    fn is_one_poly(&self) -> bool {
        self.is_constant() && self.leading().is_one()
    }
}

/// `f * dx/dt` on the chart, as a power series modulo `t^t_prec`.
pub fn integrand(f: &CurveFunction, chart: &Chart, t_prec: usize) -> Result<TruncatedSeries<Scalar>> {
    chart.expand_laurent(f)?.mul(chart.dxdt()).to_series(t_prec)
}

fn scalar(q: &Q) -> Scalar {
    Scalar::rational(q.clone())
}

/// The series `I` with `dI/dt = f dx/dt` and `I(0) = c0`, modulo `t^t_prec`.
pub fn expand_single_integral(f: &CurveFunction, chart: &Chart, t_prec: usize, c0: &Q) -> Result<TruncatedSeries<Scalar>> {
    Ok(integrand(f, chart, t_prec.saturating_sub(1))?.integrate(scalar(c0)))
}

/// The series `J` with `dJ/dt = f_i (dx/dt) I_j` and `J(0) = c_ij`, where
/// `I_j` is the single integral of `f_j` with constant `c_j`.
pub fn expand_double_integral(
    fi: &CurveFunction,
    fj: &CurveFunction,
    chart: &Chart,
    t_prec: usize,
    cj: &Q,
    cij: &Q,
) -> Result<TruncatedSeries<Scalar>> {
    let inner = expand_single_integral(fj, chart, t_prec.saturating_sub(1), cj)?;
    let d = &integrand(fi, chart, t_prec.saturating_sub(1))? * &inner;
    Ok(d.integrate(scalar(cij)))
}

/// `G` on the chart's disk, modulo `t^t_prec`.
pub fn expand_g(spec: &ColemanSpec, chart: &Chart, t_prec: usize) -> Result<TruncatedSeries<Scalar>> {
    let n = spec.dimension();
    let c = spec.constants_for(&chart.disk());
    let tm = t_prec.saturating_sub(1);
    let forms: Vec<TruncatedSeries<Scalar>> = spec.basis.iter().map(|f| integrand(f, chart, tm)).collect::<Result<_>>()?;
    let singles: Vec<TruncatedSeries<Scalar>> = forms.iter().zip(&c.single).map(|(w, c0)| w.integrate(scalar(c0))).collect();
    let mut g = TruncatedSeries::zero(t_prec);
    for i in 0..n {
        let mut row: Option<TruncatedSeries<Scalar>> = None;
        for j in 0..n {
            let a = &spec.a_matrix[i][j];
            if a.is_zero() {
                continue;
            }
            let term = singles[j].truncate(tm).scale(&scalar(a));
            row = Some(match row {
                None => term,
                Some(r) => &r + &term,
            });
        }
        if let Some(r) = row {
            // sum_j a_ij J_ij = int f_i dx/dt (sum_j a_ij I_j) + sum_j a_ij c_ij
            let c0: Q = (0..n).map(|j| &spec.a_matrix[i][j] * &c.double[i][j]).sum();
            g = &g + &(&forms[i] * &r).integrate(scalar(&c0));
        }
        if !spec.a_vector[i].is_zero() {
            g = &g + &singles[i].scale(&scalar(&spec.a_vector[i]));
        }
    }
    if let Some(eta) = &spec.eta {
        g = &g + &expand_single_integral(eta, chart, t_prec, &c.eta)?;
    }
    if !spec.h.is_zero() {
        g = &g + &chart.expand(&spec.h, t_prec)?;
    }
    Ok(g)
}

/// Result of comparing a series with the expansion of a candidate function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub matches: bool,
    pub precision: usize,
    /// Set when fewer coefficients were compared than twice the candidate's
    /// pole degree.
    pub warning: Option<String>,
}

pub fn certify_algebraic(series: &TruncatedSeries<Scalar>, candidate: &CurveFunction, chart: &Chart, curve: &CurveModel) -> Result<Certification> {
    let t = series.precision();
    let expansion = chart.expand(candidate, t)?;
    let matches = (0..t).all(|i| {
        let a = series.coeffs().get(i).cloned().unwrap_or_else(Scalar::zero);
        let b = expansion.coeffs().get(i).cloned().unwrap_or_else(Scalar::zero);
        a == b
    });
    let warning = candidate.ledger_on(curve).and_then(|l| {
        let deg = l.degree(curve.kind(), curve.genus());
        (deg >= 0 && (t as i64) < 2 * deg).then(|| format!("compared {t} coefficients; pole degree bound is {deg}"))
    });
    Ok(Certification { matches, precision: t, warning })
}

fn derivatives(base: BaseDerivation, f: &CurveFunction, n: usize) -> Vec<CurveFunction> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = f.clone();
    out.push(cur.clone());
    for _ in 0..n {
        cur = base.apply(&cur);
        out.push(cur.clone());
    }
    out
}

/// `D(G)` as a function on the curve, for `D = D_1 o d/omega_0`.
///
/// Iterated integrals contribute `sum_k g_k sum_(m<k) C(k,m) D^m(phi_i)
/// D^(k-m-1)(psi_j)` where `phi_i = omega_i/omega_0` and `psi_j` is
/// `omega_j` divided by the dual form of the base derivation; the leftover
/// `D_1(phi_i) int omega_j` must vanish.
pub fn algebraic_image(spec: &ColemanSpec, d1: &AlgebraicOperator) -> Result<CurveFunction> {
    let f = spec.h.curve_poly().clone();
    let n = spec.dimension();
    let base = d1.base();
    let order = d1.order();
    let phis: Vec<Vec<CurveFunction>> =
        spec.basis.iter().map(|w| derivatives(base, &BaseDerivation::DOmega0.quotient_of(w), order)).collect();
    let psis: Vec<Vec<CurveFunction>> = spec.basis.iter().map(|w| derivatives(base, &base.quotient_of(w), order)).collect();
    let apply_d1 = |ders: &[CurveFunction]| -> CurveFunction {
        d1.coeffs().iter().zip(ders).filter(|(g, _)| !g.is_zero()).fold(CurveFunction::zero(&f), |acc, (g, d)| acc.add(&g.mul(d)))
    };
    // inner[k] = sum_ij a_ij sum_(m<k) C(k,m) D^m(phi_i) D^(k-m-1)(psi_j)
    let mut inner = vec![CurveFunction::zero(&f); order + 1];
    for i in 0..n {
        if spec.a_matrix[i].iter().all(|a| a.is_zero()) {
            continue;
        }
        if !apply_d1(&phis[i]).is_zero() {
            return Err(Error::NotAlgebraic(format!("the operator does not annihilate omega_{i}/omega_0")));
        }
        let mut psi_comb: Vec<CurveFunction> = vec![CurveFunction::zero(&f); order + 1];
        for (j, psi) in psis.iter().enumerate() {
            let a = &spec.a_matrix[i][j];
            if a.is_zero() {
                continue;
            }
            for (m, d) in psi.iter().enumerate() {
                psi_comb[m] = psi_comb[m].add(&d.scale(a));
            }
        }
        for (k, slot) in inner.iter_mut().enumerate().skip(1) {
            for m in 0..k {
                let c = Q::from_integer(binomial(k as u64, m as u64));
                *slot = slot.add(&phis[i][m].mul(&psi_comb[k - m - 1]).scale(&c));
            }
        }
    }
    let mut image = d1.coeffs().iter().zip(&inner).filter(|(g, _)| !g.is_zero()).fold(CurveFunction::zero(&f), |acc, (g, s)| acc.add(&g.mul(s)));
    for i in 0..n {
        if !spec.a_vector[i].is_zero() {
            image = image.add(&apply_d1(&phis[i]).scale(&spec.a_vector[i]));
        }
    }
    if let Some(eta) = &spec.eta {
        image = image.add(&apply_d1(&derivatives(base, &BaseDerivation::DOmega0.quotient_of(eta), order)));
    }
    if !spec.h.is_zero() {
        image = image.add(&apply_d1(&derivatives(base, &spec.h.d_by_omega0(), order)));
    }
    Ok(image)
}

/// The closed form of `(d/dx)^r o d/omega_0` applied to `G` for the basis
/// `x^i/y`: `sum_ij a_ij sum_(k<=i) C(r,k) i!/(i-k)! x^(i-k) (d/dx)^(r-1-k)
/// (x^j/y)` plus the images of `a_i int omega_i`, `eta` and `h`. Here
/// `r = 2g+1` on even models and `2g` on odd ones.
pub fn nonweierstrass_image_closed_form(spec: &ColemanSpec) -> Result<CurveFunction> {
    let curve = &spec.curve;
    if spec.basis != default_basis(curve) {
        return Err(Error::InvalidInput("the closed form needs the basis x^i/y".into()));
    }
    let f = spec.h.curve_poly().clone();
    let r = nonweierstrass_order(curve);
    let n = spec.dimension();
    let mut out = CurveFunction::zero(&f);
    for i in 0..n {
        for j in 0..n {
            let a = &spec.a_matrix[i][j];
            if a.is_zero() {
                continue;
            }
            let ders = derivatives(BaseDerivation::DDx, &CurveFunction::x_pow_over_y(&f, j), r);
            for k in 0..=i.min(r - 1) {
                let falling: Q = (0..k).map(|s| Q::from_integer(((i - s) as i64).into())).product();
                let c = Q::from_integer(binomial(r as u64, k as u64)) * falling;
                let xpow = CurveFunction::from_poly(&f, Poly::monomial(i - k, Q::one()));
                out = out.add(&xpow.mul(&ders[r - 1 - k]).scale(&(c * a)));
            }
        }
    }
    let dr = |g: &CurveFunction| derivatives(BaseDerivation::DDx, g, r).pop().expect("nonempty");
    for i in 0..n {
        if !spec.a_vector[i].is_zero() {
            let xi = CurveFunction::from_poly(&f, Poly::monomial(i, Q::one()));
            out = out.add(&dr(&xi).scale(&spec.a_vector[i]));
        }
    }
    if let Some(eta) = &spec.eta {
        out = out.add(&dr(&BaseDerivation::DOmega0.quotient_of(eta)));
    }
    out = out.add(&dr(&spec.h.d_by_omega0()));
    Ok(out)
}

/// Order `r` of the non-Weierstrass factor `(d/dx)^r`.
pub fn nonweierstrass_order(curve: &CurveModel) -> usize {
    let g = curve.genus();
    match curve.kind() {
        ModelKind::Even => 2 * g + 1,
        ModelKind::Odd => 2 * g,
    }
}

/// Declared pole ledger of `D(G)` on non-Weierstrass disks: `(g+1) inf +
/// (4g+1) W` for even models, `(2g-1) inf + (4g-1) W` for odd ones.
pub fn nonweierstrass_image_ledger(curve: &CurveModel) -> PoleLedger {
    let g = curve.genus() as i64;
    match curve.kind() {
        ModelKind::Even => PoleLedger::new(g + 1, 4 * g + 1),
        ModelKind::Odd => PoleLedger::new(2 * g - 1, 4 * g - 1),
    }
}

/// Default working precision `4g^2 + 10g + 16`.
pub fn default_precision(genus: usize) -> usize {
    4 * genus * genus + 10 * genus + 16
}

/// How a disk is treated.
#[derive(Debug, Clone)]
pub enum DiskPlan {
    /// `D = D_1 o d/omega_0` with the given first factor.
    Operator { d1: AlgebraicOperator, description: String },
    /// `N_b` taken from a degree ledger rather than a series computation.
    Ledger { n_b: u64, order: u64, reason: String },
    Skip(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "detail")]
pub enum DiskStatus {
    Ok,
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskReport {
    pub disk: DiskDescriptor,
    pub label: String,
    pub parameter: Option<String>,
    pub operator: Option<String>,
    pub order: Option<u64>,
    pub niceness: Option<NicenessCertificate>,
    pub image: Option<String>,
    pub image_ledger: Option<PoleLedger>,
    pub certification: Option<Certification>,
    pub n_b: Option<u64>,
    pub n_b_source: Option<String>,
    pub bound: Option<i64>,
    pub status: DiskStatus,
    #[serde(skip)]
    pub exit_code: i32,
}

impl DiskReport {
    fn empty(disk: DiskDescriptor) -> Self {
        DiskReport {
            label: disk.to_string(),
            disk,
            parameter: None,
            operator: None,
            order: None,
            niceness: None,
            image: None,
            image_ledger: None,
            certification: None,
            n_b: None,
            n_b_source: None,
            bound: None,
            status: DiskStatus::Ok,
            exit_code: 0,
        }
    }

    fn fail(&mut self, e: &Error) {
        self.status = DiskStatus::Failed(e.to_string());
        self.exit_code = e.exit_code();
    }
}

/// Precomputed operators and images shared by all disks of one run.
pub struct Analyzer<'a> {
    spec: &'a ColemanSpec,
    p: Prime,
    precision: usize,
    nonweierstrass: Option<Result<(AlgebraicOperator, CurveFunction)>>,
    weierstrass: Option<Result<(AlgebraicOperator, CurveFunction)>>,
}

const CHART_MARGINS: [usize; 3] = [16, 64, 256];

impl<'a> Analyzer<'a> {
    pub fn new(spec: &'a ColemanSpec, p: Prime, precision: usize, disks: &[DiskDescriptor]) -> Result<Self> {
        spec.validate()?;
        let curve = &spec.curve;
        if curve.kind() == ModelKind::Even && curve.genus() < 2 {
            return Err(Error::InvalidInput("even models need genus at least 2".into()));
        }
        let elliptic = curve.genus() == 1;
        let needs_nonw = disks.iter().any(|d| {
            d.kind == DiskKind::AffineNonWeierstrass || (elliptic && d.kind == DiskKind::AffineWeierstrass)
        });
        let needs_w = !elliptic && disks.iter().any(|d| d.kind == DiskKind::AffineWeierstrass);
        let nonweierstrass = needs_nonw.then(|| {
            let d1 = if elliptic {
                AlgebraicOperator::power(curve, 1, BaseDerivation::DOmega0)
            } else {
                AlgebraicOperator::power(curve, nonweierstrass_order(curve), BaseDerivation::DDx)
            };
            let image = algebraic_image(spec, &d1)?;
            Ok((d1, image))
        });
        let weierstrass = needs_w.then(|| {
            let w = weierstrass_annihilator(curve)?;
            w.det_b_units(curve, p)?;
            let image = algebraic_image(spec, &w.operator)?;
            Ok((w.operator, image))
        });
        Ok(Analyzer { spec, p, precision, nonweierstrass, weierstrass })
    }

    pub fn plan(&self, disk: &DiskDescriptor) -> Result<DiskPlan> {
        let curve = &self.spec.curve;
        let g = curve.genus();
        let get = |slot: &Option<Result<(AlgebraicOperator, CurveFunction)>>| -> Result<AlgebraicOperator> {
            match slot {
                Some(Ok((d1, _))) => Ok(d1.clone()),
                Some(Err(e)) => Err(e.clone()),
                None => Err(Error::InvalidInput(format!("disk {disk} was not announced to the analyzer"))),
            }
        };
        Ok(match (disk.kind, curve.kind()) {
            (DiskKind::Infinite, ModelKind::Odd) => DiskPlan::Skip("integral points do not meet the point at infinity".into()),
            (DiskKind::Infinite, ModelKind::Even) => DiskPlan::Ledger {
                n_b: degree_ledger(g as u64, LedgerCase::HyperNonW)?.get("image").expect("entry") as u64,
                order: 2 * g as u64 + 2,
                reason: "D(G) has poles on the disks at infinity; N_b is bounded by the degree of its pole divisor".into(),
            },
            (DiskKind::AffineWeierstrass, _) if g >= 2 => {
                DiskPlan::Operator { d1: get(&self.weierstrass)?, description: "Weierstrass annihilator of x^j".into() }
            }
            _ if g == 1 => DiskPlan::Operator { d1: get(&self.nonweierstrass)?, description: "d/omega_0".into() },
            _ => DiskPlan::Operator {
                d1: get(&self.nonweierstrass)?,
                description: format!("(d/dx)^{}", nonweierstrass_order(curve)),
            },
        })
    }

    fn image_for(&self, disk: &DiskDescriptor) -> Result<&CurveFunction> {
        let slot = if disk.kind == DiskKind::AffineWeierstrass && self.spec.curve.genus() >= 2 {
            &self.weierstrass
        } else {
            &self.nonweierstrass
        };
        match slot {
            Some(Ok((_, image))) => Ok(image),
            Some(Err(e)) => Err(e.clone()),
            None => Err(Error::InvalidInput(format!("disk {disk} was not announced to the analyzer"))),
        }
    }

    pub fn analyze(&self, disk: DiskDescriptor) -> DiskReport {
        let mut report = DiskReport::empty(disk);
        if let Err(e) = self.analyze_into(&mut report) {
            report.fail(&e);
        }
        report
    }

    fn analyze_into(&self, report: &mut DiskReport) -> Result<()> {
        let disk = report.disk;
        let curve = &self.spec.curve;
        match self.plan(&disk)? {
            DiskPlan::Skip(reason) => {
                report.status = DiskStatus::Skipped(reason);
                Ok(())
            }
            DiskPlan::Ledger { n_b, order, reason } => {
                report.operator = Some(format!("(d/dx)^{} o d/omega_0", order - 1));
                report.order = Some(order);
                report.n_b = Some(n_b);
                report.n_b_source = Some(format!("degree ledger: {reason}"));
                report.bound = Some(per_disk_bound(n_b, order, self.p)?);
                Ok(())
            }
            DiskPlan::Operator { d1, description } => {
                let n = d1.order() + 1;
                let t = self.precision;
                if t <= n + 1 {
                    return Err(Error::InsufficientPrecision(format!("T = {t} must exceed the operator order {n} plus one")));
                }
                report.operator = Some(format!("{description} o d/omega_0"));
                report.order = Some(n as u64);
                let image = self.image_for(&disk)?;
                report.image = Some(image.to_string());
                report.image_ledger = image.ledger_on(curve);
                let mut last = None;
                for margin in CHART_MARGINS {
                    let chart = Chart::new(curve, disk, self.p, t + n + margin)?;
                    report.parameter = Some(chart.parameter());
                    match self.series_stage(&chart, &d1, image, report) {
                        Err(e @ Error::InsufficientPrecision(_)) => last = Some(e),
                        other => return other,
                    }
                }
                Err(last.expect("at least one attempt"))
            }
        }
    }

    fn series_stage(&self, chart: &Chart, d1: &AlgebraicOperator, image: &CurveFunction, report: &mut DiskReport) -> Result<()> {
        let t = self.precision;
        let n = d1.order() + 1;
        let local = d1.localize(chart, t - 1)?;
        let w0 = chart.omega0_factor(t)?;
        let d = compose_with_base(&local, &w0, self.p)?;
        let cert = d.check_nice(self.p);
        let nice = cert.is_nice();
        report.niceness = Some(cert.clone());
        let g = expand_g(self.spec, chart, t)?;
        let dg = d.apply(&g)?;
        let certification = certify_algebraic(&dg, image, chart, &self.spec.curve)?;
        let matches = certification.matches;
        report.certification = Some(certification);
        if !matches {
            return Err(Error::InternalContradiction(format!("the series D(G) differs from the algebraic image {image}")));
        }
        let floor = ValuationFloor::AtLeast(self.spec.valuation_floor(self.p));
        let n_b = min_valuation_index(&dg, self.p, floor)? as u64;
        report.n_b = Some(n_b);
        report.n_b_source = Some(format!("min S(D(G)) from {} certified coefficients", dg.precision()));
        if !nice {
            let f = cert.failure.expect("not nice");
            return Err(Error::DegenerateOperator(format!(
                "operator is not nice on this disk: coefficient of (d/dt)^{} has valuation {} ({})",
                f.index, f.valuation, f.reason
            )));
        }
        report.bound = Some(per_disk_bound(n_b, n as u64, self.p)?);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub curve: String,
    pub p: u64,
    pub precision: usize,
    pub disks: Vec<DiskReport>,
    /// Sum of the per-disk bounds, when every analysed disk succeeded.
    pub total: Option<i64>,
    pub failures: usize,
}

impl PipelineReport {
    pub fn exit_code(&self) -> i32 {
        self.disks.iter().map(|d| d.exit_code).max().unwrap_or(0)
    }
}

/// Analyses every residue disk of the spec's curve (in parallel; the report
/// keeps the sorted disk order).
pub fn run_pipeline(spec: &ColemanSpec, p: Prime, precision: usize) -> Result<PipelineReport> {
    let disks = spec.curve.residue_disks(p)?;
    let analyzer = Analyzer::new(spec, p, precision, &disks)?;
    let reports: Vec<DiskReport> = disks.par_iter().map(|d| analyzer.analyze(*d)).collect();
    let failures = reports.iter().filter(|r| matches!(r.status, DiskStatus::Failed(_))).count();
    let total = (failures == 0).then(|| reports.iter().filter_map(|r| r.bound).sum());
    Ok(PipelineReport { curve: spec.curve.to_line(), p: p.get(), precision, disks: reports, total, failures })
}

/// Analyses a single disk.
pub fn analyze_disk(spec: &ColemanSpec, disk: DiskDescriptor, p: Prime, precision: usize) -> Result<DiskReport> {
    let analyzer = Analyzer::new(spec, p, precision, &[disk])?;
    Ok(analyzer.analyze(disk))
}

/// The operator used on one disk and its niceness there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorReport {
    pub disk: DiskDescriptor,
    pub label: String,
    pub parameter: Option<String>,
    pub operator: String,
    pub order: u64,
    /// Coefficients of the first factor `D_1`, lowest order first.
    pub coefficients: Vec<String>,
    pub niceness: Option<NicenessCertificate>,
    /// `(x, det B(x) mod p)` at each Weierstrass disk, when that operator is used.
    pub det_b_residues: Option<Vec<(u64, u64)>>,
    pub note: Option<String>,
}

/// Builds the disk's operator `D = D_1 o d/omega_0`, localizes it with
/// coefficients known modulo `t^precision` and tests niceness.
pub fn describe_operator(curve: &CurveModel, disk: DiskDescriptor, p: Prime, precision: usize) -> Result<OperatorReport> {
    let spec = ColemanSpec::zero(curve.clone());
    let analyzer = Analyzer::new(&spec, p, precision, &[disk])?;
    let mut report = OperatorReport {
        disk,
        label: disk.to_string(),
        parameter: None,
        operator: String::new(),
        order: 0,
        coefficients: Vec::new(),
        niceness: None,
        det_b_residues: None,
        note: None,
    };
    match analyzer.plan(&disk)? {
        DiskPlan::Skip(reason) => {
            report.operator = "none".into();
            report.note = Some(reason);
        }
        DiskPlan::Ledger { order, reason, .. } => {
            report.operator = format!("(d/dx)^{} o d/omega_0", order - 1);
            report.order = order;
            report.note = Some(reason);
        }
        DiskPlan::Operator { d1, description } => {
            let n = d1.order() + 1;
            if precision <= n + 1 {
                return Err(Error::InsufficientPrecision(format!("T = {precision} must exceed the operator order {n} plus one")));
            }
            report.operator = format!("{description} o d/omega_0");
            report.order = n as u64;
            report.coefficients = d1.coeffs().iter().map(|c| c.to_string()).collect();
            if disk.kind == DiskKind::AffineWeierstrass && curve.genus() >= 2 {
                report.det_b_residues = Some(weierstrass_annihilator(curve)?.det_b_units(curve, p)?);
            }
            let mut last = None;
            for margin in CHART_MARGINS {
                let chart = Chart::new(curve, disk, p, precision + n + margin)?;
                report.parameter = Some(chart.parameter());
                let attempt = d1
                    .localize(&chart, precision - 1)
                    .and_then(|local| compose_with_base(&local, &chart.omega0_factor(precision)?, p));
                match attempt {
                    Ok(d) => {
                        report.niceness = Some(d.check_nice(p));
                        return Ok(report);
                    }
                    Err(e @ Error::InsufficientPrecision(_)) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            return Err(last.expect("at least one attempt"));
        }
    }
    Ok(report)
}

/// Finds the residue disk whose label (e.g. `(3, 2)`, `inf+`) matches.
pub fn find_disk(curve: &CurveModel, p: Prime, label: &str) -> Result<DiskDescriptor> {
    let norm = |s: &str| s.chars().filter(|c| !c.is_whitespace() && *c != '(' && *c != ')').collect::<String>();
    let want = norm(label);
    curve
        .residue_disks(p)?
        .into_iter()
        .find(|d| norm(&d.to_string()) == want)
        .ok_or_else(|| Error::InvalidInput(format!("no residue disk {label:?} at p = {p}")))
}
