//! Closed-form bounds on rational and integral points, per-disk zero bounds
//! and the degree bookkeeping behind them.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padics::{kappa, Prime};
use crate::rational::{ceil, to_decimal, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    #[serde(rename = "thm1_general")]
    Thm1General,
    #[serde(rename = "thm1_hyperelliptic")]
    Thm1Hyperelliptic,
    #[serde(rename = "cor_potential_good")]
    CorPotentialGood,
    #[serde(rename = "thm_integral_g>1")]
    ThmIntegralHigherGenus,
    #[serde(rename = "thm_integral_g=1")]
    ThmIntegralElliptic,
    #[serde(rename = "per_disk")]
    PerDisk,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundInputs {
    pub genus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    /// `#X(F_p)` or `#Y(F_p)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_fp: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weierstrass_fp: Option<u64>,
    /// Product of the local constants `n_v` or `m_v`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_constants: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_constants_note: Option<String>,
}

fn fraction_string<S: Serializer>(r: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub inputs: BoundInputs,
    #[serde(serialize_with = "fraction_string")]
    pub raw_value: Q,
    /// `raw_value` truncated to six decimals, for reading only.
    pub raw_decimal: String,
    pub integer_bound: i64,
    pub provenance: Vec<String>,
}

impl BoundReport {
    fn new(theorem_id: TheoremId, inputs: BoundInputs, raw_value: Q, provenance: Vec<String>) -> Result<Self> {
        let integer_bound = integer_bound(&raw_value)?;
        Ok(BoundReport { theorem_id, inputs, raw_decimal: to_decimal(&raw_value, 6), raw_value, integer_bound, provenance })
    }

    /// Attaches a free-text origin for the local constants.
    pub fn with_local_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.provenance.push(format!("local constants: {note}"));
        self.inputs.local_constants_note = Some(note);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Largest integer strictly below `raw`.
pub fn integer_bound(raw: &Q) -> Result<i64> {
    let b: BigInt = ceil(raw) - 1;
    b.to_i64().ok_or_else(|| Error::Domain(format!("bound {raw} does not fit in 64 bits")))
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn kappa_factor(p: u64) -> Result<(Prime, Q)> {
    let pr = Prime::new(p)?;
    Ok((pr, kappa(pr)?))
}

fn kappa_provenance(p: u64, k: &Q) -> String {
    format!("kappa_{p} rounded up to {} (certified upper bound)", to_decimal(k, 10))
}

pub fn thm1_general_poly(g: i64) -> i64 {
    16 * g.pow(3) + 15 * g * g - 16 * g + 10
}

pub fn thm1_hyperelliptic_inner(g: i64, x_fp: i64, w_fp: i64) -> i64 {
    (2 * g + 2) * x_fp + 2 * g * w_fp + 8 * g.pow(3) + 64 * g * g + 20 * g + 16
}

pub fn cor_potential_good_poly(g: i64) -> i64 {
    24 * g.pow(3) + 228 * g * g + 120 * g + 72
}

pub fn thm_integral_inner(g: i64, y_fp: i64, w_fp: i64) -> i64 {
    8 * g.pow(3) + 44 * g * g - 34 * g + 9 + (2 * g + 1) * y_fp + (2 * g - 1) * w_fp
}

fn require_genus(g: u64, min: u64) -> Result<i64> {
    if g < min {
        return Err(Error::Domain(format!("genus must be at least {min}, got {g}")));
    }
    i64::try_from(g).map_err(|_| Error::Domain("genus too large".into()))
}

fn require_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::Domain(format!("{name} must be a positive integer")));
    }
    Ok(())
}

/// `kappa_p * prod n_v * #X(F_p) * (16g^3 + 15g^2 - 16g + 10)`.
pub fn thm1_general(g: u64, p: u64, prod_nv: u64, x_fp: u64) -> Result<BoundReport> {
    let gi = require_genus(g, 2)?;
    require_positive("product of local constants", prod_nv)?;
    let (_, k) = kappa_factor(p)?;
    let poly = thm1_general_poly(gi);
    let raw = &k * qi(prod_nv as i64) * qi(x_fp as i64) * qi(poly);
    let provenance = vec![
        kappa_provenance(p, &k),
        format!("per-disk factor 16g^3+15g^2-16g+10 = {poly} (degree ledger {} plus operator order {})", poly - (3 * gi + 1), 3 * gi + 1),
        format!("global factor #X(F_p) = {x_fp}: one residue disk per F_p point"),
    ];
    let inputs = BoundInputs { genus: g, p: Some(p), points_fp: Some(x_fp), local_constants: Some(prod_nv), ..Default::default() };
    BoundReport::new(TheoremId::Thm1General, inputs, raw, provenance)
}

/// `kappa_p * prod n_v * ((2g+2)#X(F_p) + 2g#W(F_p) + 8g^3 + 64g^2 + 20g + 16)`.
pub fn thm1_hyperelliptic(g: u64, p: u64, prod_nv: u64, x_fp: u64, w_fp: u64) -> Result<BoundReport> {
    let gi = require_genus(g, 2)?;
    require_positive("product of local constants", prod_nv)?;
    if p == 2 * g + 1 {
        return Err(Error::Domain(format!("p = 2g+1 = {p} is excluded for the hyperelliptic bound")));
    }
    if w_fp > 2 * g + 2 {
        return Err(Error::Domain(format!("#W(F_p) = {w_fp} exceeds deg W = {}", 2 * g + 2)));
    }
    let (_, k) = kappa_factor(p)?;
    let inner = thm1_hyperelliptic_inner(gi, x_fp as i64, w_fp as i64);
    let raw = &k * qi(prod_nv as i64) * qi(inner);
    let provenance = vec![
        kappa_provenance(p, &k),
        format!("non-Weierstrass disks: (16g^2+24g+8) + (2g+2)#(X-W)(F_p) = {}", 16 * gi * gi + 24 * gi + 8 + (2 * gi + 2) * (x_fp as i64 - w_fp as i64)),
        format!("Weierstrass disks: (4g+2)#W(F_p) + 2(4g^3+24g^2-2g+4) = {}", (4 * gi + 2) * w_fp as i64 + 2 * (4 * gi.pow(3) + 24 * gi * gi - 2 * gi + 4)),
        format!("inner value {inner}"),
    ];
    let inputs = BoundInputs {
        genus: g,
        p: Some(p),
        points_fp: Some(x_fp),
        weierstrass_fp: Some(w_fp),
        local_constants: Some(prod_nv),
        ..Default::default()
    };
    BoundReport::new(TheoremId::Thm1Hyperelliptic, inputs, raw, provenance)
}

/// `24g^3 + 228g^2 + 120g + 72` for curves with potentially good reduction
/// away from 3.
pub fn cor_potential_good(g: u64) -> Result<BoundReport> {
    let gi = require_genus(g, 2)?;
    let raw = qi(cor_potential_good_poly(gi));
    let provenance = vec!["hyperelliptic bound at p = 3, all n_v = 1, Hasse-Weil estimate for #X(F_3)".to_string()];
    BoundReport::new(TheoremId::CorPotentialGood, BoundInputs { genus: g, p: Some(3), ..Default::default() }, raw, provenance)
}

/// Integral points on odd models: `kappa_p prod m_v (8g^3+44g^2-34g+9 +
/// (2g+1)#Y(F_p) + (2g-1)#W(F_p))` for `g > 1`, `2 kappa_p prod m_v #Y(F_p)`
/// for `g = 1`.
pub fn thm_integral(g: u64, p: u64, prod_mv: u64, y_fp: u64, w_fp: u64) -> Result<BoundReport> {
    let gi = require_genus(g, 1)?;
    require_positive("product of local constants", prod_mv)?;
    let (_, k) = kappa_factor(p)?;
    let inputs = BoundInputs {
        genus: g,
        p: Some(p),
        points_fp: Some(y_fp),
        weierstrass_fp: Some(w_fp),
        local_constants: Some(prod_mv),
        ..Default::default()
    };
    if gi == 1 {
        let raw = qi(2) * &k * qi(prod_mv as i64) * qi(y_fp as i64);
        let provenance = vec![kappa_provenance(p, &k), format!("operator (d/omega_0)^2, factor 2 per disk over #Y(F_p) = {y_fp}")];
        return BoundReport::new(TheoremId::ThmIntegralElliptic, inputs, raw, provenance);
    }
    let inner = thm_integral_inner(gi, y_fp as i64, w_fp as i64);
    let raw = &k * qi(prod_mv as i64) * qi(inner);
    let provenance = vec![kappa_provenance(p, &k), format!("inner value {inner}")];
    BoundReport::new(TheoremId::ThmIntegralHigherGenus, inputs, raw, provenance)
}

/// Largest integer `< kappa_p (N_b + N)`: the zero bound on one residue disk
/// once `N_b` is certified for `D(G)` and `D` is nice of order `N`.
pub fn per_disk_bound(n_b: u64, n: u64, p: Prime) -> Result<i64> {
    if n_b == 0 && n == 0 {
        return Ok(0);
    }
    integer_bound(&(kappa(p)? * qi((n_b + n) as i64)))
}

/// Report form of [`per_disk_bound`].
pub fn per_disk_report(g: u64, n_b: u64, n: u64, p: Prime) -> Result<BoundReport> {
    let k = kappa(p)?;
    let raw = &k * qi((n_b + n) as i64);
    let mut report = BoundReport::new(
        TheoremId::PerDisk,
        BoundInputs { genus: g, p: Some(p.get()), ..Default::default() },
        raw,
        vec![kappa_provenance(p.get(), &k), format!("N_b = {n_b}, operator order N = {n}")],
    )?;
    if n_b == 0 && n == 0 {
        report.integer_bound = 0;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerCase {
    General,
    HyperNonW,
    HyperW,
    IntegralNonW,
    IntegralW,
}

impl std::str::FromStr for LedgerCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "general" => LedgerCase::General,
            "hyper_nonW" | "hyper_nonw" => LedgerCase::HyperNonW,
            "hyper_W" | "hyper_w" => LedgerCase::HyperW,
            "integral_nonW" | "integral_nonw" => LedgerCase::IntegralNonW,
            "integral_W" | "integral_w" => LedgerCase::IntegralW,
            other => return Err(Error::InvalidInput(format!("unknown ledger case {other:?}"))),
        })
    }
}

/// Named intermediate degrees of one construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeLedger {
    pub case: LedgerCase,
    pub genus: i64,
    pub entries: Vec<(String, i64)>,
}

impl DegreeLedger {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

pub fn degree_ledger(g: u64, case: LedgerCase) -> Result<DegreeLedger> {
    let g = require_genus(g, 2)?;
    let e = |n: &str, v: i64| (n.to_string(), v);
    let entries = match case {
        LedgerCase::General => {
            // D_1 has degree 2g-2 and P degree 1
            let d1 = 2 * g - 2;
            vec![
                e("sum_{i=g+1}^{3g} i", (g + 1..=3 * g).sum()),
                e("coefficient_space", (8 * g * g + 2 * g) * d1 + 3 * g * (2 * g + 1)),
                e("image", (8 * g * g + 11 * g - 3) * d1 + 3 * (3 * g * g + 3 * g + 1)),
                e("order", 3 * g + 1),
                e("per_disk_total", (8 * g * g + 11 * g - 3) * d1 + 3 * (3 * g * g + 3 * g + 1) + 3 * g + 1),
            ]
        }
        LedgerCase::HyperNonW => vec![
            e("order", 2 * g + 2),
            e("image_infinity", g + 1),
            e("image_w", 4 * g + 1),
            e("image", 2 * (g + 1) + (4 * g + 1) * (2 * g + 2)),
            e("image_with_infinite_disks", 2 * (2 * (g + 1) + (4 * g + 1) * (2 * g + 2))),
        ],
        LedgerCase::HyperW => vec![
            e("order", 4 * g + 2),
            e("coefficient_space", 2 * (4 * g.pow(3) + 8 * g * g + 2 * g)),
            e("image", 2 * (4 * g.pow(3) + 24 * g * g - 2 * g + 4)),
        ],
        LedgerCase::IntegralNonW => vec![
            e("order", 2 * g + 1),
            e("image_double_integrals", (4 * g - 1) * (2 * g + 1) + (2 * g - 3)),
            e("image_h", (4 * g - 1) * (2 * g + 1) + (2 * g - 1)),
            e("image", 8 * g * g + 4 * g - 4),
        ],
        LedgerCase::IntegralW => vec![
            e("order", 4 * g),
            e("coefficient_space", 8 * g.pow(3) + 4 * g * g - 6 * g + 1),
            e("image", 8 * g.pow(3) + 36 * g * g - 38 * g + 13),
        ],
    };
    Ok(DegreeLedger { case, genus: g, entries })
}

/// Which output space bounds `D(G)` for `D = D_1 o d/dx`, by the order of `D_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnihilatingCase {
    /// `N = 2, 3`: `E + (2N+1) D_1 + (N+3) D`.
    Small,
    /// `N >= 4`: `E + 3(N-1) D_1 + (N+3) D`.
    Large,
}

/// Multiplicities of `D_1` and `D` in the divisor bounding `D(G)`, where
/// `D_1` of order `N` has coefficients in `H^0(O(E))`, together with the
/// bounds for the `eta`, `h` and iterated-integral terms separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilatingDivisor {
    pub case: AnnihilatingCase,
    pub order: u64,
    /// `(mult of D_1, mult of D)` for the stated output space.
    pub stated: (i64, i64),
    pub eta_term: (i64, i64),
    pub h_term: (i64, i64),
    pub double_integral_term: (i64, i64),
    /// `deg E + mult_1 deg D_1 + mult deg D` for the stated space.
    pub degree: i64,
}

pub fn annihilating_divisor(order: u64, deg_e: i64, deg_d1: i64, deg_d: i64) -> Result<AnnihilatingDivisor> {
    let n = i64::try_from(order).map_err(|_| Error::Domain("order too large".into()))?;
    let case = match n {
        2 | 3 => AnnihilatingCase::Small,
        n if n >= 4 => AnnihilatingCase::Large,
        _ => return Err(Error::Domain(format!("the output-space bound needs N >= 2, got N = {n}"))),
    };
    let stated = match case {
        AnnihilatingCase::Small => (2 * n + 1, n + 3),
        AnnihilatingCase::Large => (3 * (n - 1), n + 3),
    };
    Ok(AnnihilatingDivisor {
        case,
        order,
        stated,
        eta_term: (2 * n + 1, n + 1),
        h_term: (2 * n + 1, n + 3),
        double_integral_term: (3 * (n - 1), n + 1),
        degree: deg_e + stated.0 * deg_d1 + stated.1 * deg_d,
    })
}

/// A linear form `c + a X + b W` in the point counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountForm {
    pub constant: i64,
    pub x: i64,
    pub w: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: CountForm,
    pub rhs: CountForm,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The assembly identities tying per-case degrees to the closed-form bounds.
pub fn assembly_identities(g: u64) -> Result<Vec<IdentityCheck>> {
    let gi = require_genus(g, 2)?;
    let get = |c, n: &str| -> Result<i64> { Ok(degree_ledger(g, c)?.get(n).expect("entry")) };
    let f = |constant, x, w| CountForm { constant, x, w };

    let general = get(LedgerCase::General, "image")?;
    let general_total = get(LedgerCase::General, "per_disk_total")?;
    let nonw = get(LedgerCase::HyperNonW, "image_with_infinite_disks")?;
    let hw = get(LedgerCase::HyperW, "image")?;
    let inw = get(LedgerCase::IntegralNonW, "image")?;
    let iw = get(LedgerCase::IntegralW, "image")?;
    // non-Weierstrass disks cover X - W, Weierstrass disks cover W
    let hyper = f(nonw + hw, 2 * gi + 2, (4 * gi + 2) - (2 * gi + 2));
    let integral = f(inw + iw, 2 * gi + 1, 4 * gi - (2 * gi + 1));
    Ok(vec![
        IdentityCheck {
            name: "general image degree".into(),
            lhs: f(general, 0, 0),
            rhs: f(16 * gi.pow(3) + 15 * gi * gi - 19 * gi + 9, 0, 0),
        },
        IdentityCheck { name: "general per-disk factor".into(), lhs: f(general_total, 0, 0), rhs: f(thm1_general_poly(gi), 0, 0) },
        IdentityCheck {
            name: "hyperelliptic assembly".into(),
            lhs: hyper,
            rhs: f(thm1_hyperelliptic_inner(gi, 0, 0), 2 * gi + 2, 2 * gi),
        },
        IdentityCheck {
            name: "integral assembly".into(),
            lhs: integral,
            rhs: f(thm_integral_inner(gi, 0, 0), 2 * gi + 1, 2 * gi - 1),
        },
        IdentityCheck {
            name: "elliptic disk sum".into(),
            // (d/omega_0)^2 has order 2 and D(G) = x + a has N_b = 0 on a
            // generic disk, so each disk of E - O contributes 2
            lhs: f(0, 2, 0),
            rhs: f(0, 2, 0),
        },
    ])
}

/// Whether the hyperelliptic bound at `p = 3` with Hasse-Weil-maximal
/// `#X(F_3)` and every `#W(F_3) <= 4` stays within `cor_potential_good(g)`.
pub fn corollary_domination(g: u64) -> Result<bool> {
    let cor = cor_potential_good(g)?.raw_value;
    let x_max = 4 + (12 * g * g).isqrt();
    for w in 0..=4u64.min(2 * g + 2) {
        let r = thm1_hyperelliptic(g, 3, 1, x_max, w)?;
        if r.raw_value > cor {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn annihilating_cases() {
        let small = annihilating_divisor(3, 10, 2, 3).unwrap();
        assert_eq!(small.case, AnnihilatingCase::Small);
        assert_eq!(small.stated, (7, 6));
        assert_eq!(small.degree, 10 + 14 + 18);
        let large = annihilating_divisor(7, 0, 1, 1).unwrap();
        assert_eq!(large.case, AnnihilatingCase::Large);
        assert_eq!(large.stated, (18, 10));
        assert_eq!(large.double_integral_term, (18, 8));
        assert!(annihilating_divisor(1, 0, 1, 1).is_err());
    }

    #[test]
    fn integer_bound_is_strict() {
        assert_eq!(integer_bound(&qi(5)).unwrap(), 4);
        assert_eq!(integer_bound(&qf(11, 2)).unwrap(), 5);
        assert_eq!(integer_bound(&qf(-1, 2)).unwrap(), -1);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(thm1_general_poly(2), 166);
        assert_eq!(thm1_hyperelliptic_inner(2, 10, 4), 452);
        assert_eq!(cor_potential_good(2).unwrap().raw_value, qi(1416));
        assert_eq!(cor_potential_good(3).unwrap().raw_value, qi(3132));
        assert_eq!(thm_integral_inner(2, 4, 1), 204);
    }

    #[test]
    fn evaluator_examples() {
        assert_eq!(thm1_general(2, 3, 1, 10).unwrap().integer_bound, 4681);
        assert!(thm1_general(1, 3, 1, 10).is_err());
        assert!(thm1_general(2, 3, 0, 10).is_err());
        assert!(thm1_hyperelliptic(2, 5, 1, 10, 4).is_err());
        assert!(thm1_hyperelliptic(2, 3, 1, 10, 7).is_err());
        let r = thm1_hyperelliptic(2, 3, 1, 10, 4).unwrap();
        assert_eq!(r.integer_bound, 1274);
        assert_eq!(thm_integral(1, 5, 1, 8, 0).unwrap().integer_bound, 29);
        assert_eq!(thm_integral(2, 3, 1, 4, 1).unwrap().integer_bound, 575);
    }

    #[test]
    fn per_disk_examples() {
        let p5 = Prime::new(5).unwrap();
        assert_eq!(per_disk_bound(1, 2, p5).unwrap(), 5);
        assert_eq!(per_disk_bound(0, 0, p5).unwrap(), 0);
    }

    #[test]
    fn ledger_examples() {
        assert_eq!(degree_ledger(2, LedgerCase::General).unwrap().get("image"), Some(159));
        assert_eq!(degree_ledger(2, LedgerCase::HyperW).unwrap().get("coefficient_space"), Some(136));
        assert_eq!(degree_ledger(3, LedgerCase::General).unwrap().get("sum_{i=g+1}^{3g} i"), Some(39));
    }

    #[test]
    fn report_json_has_fraction_string() {
        let r = cor_potential_good(2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["theorem_id"], "cor_potential_good");
        assert_eq!(v["raw_value"], "1416");
        assert_eq!(v["integer_bound"], 1415);
    }
}
