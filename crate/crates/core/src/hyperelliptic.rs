//! Hyperelliptic models `y^2 = f(x)` with monic `f`, reduction mod p,
//! residue disks and naive point counts over F_p.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padics::{reduce_mod_p, Prime};
use crate::poly::{discriminant, eval_mod_p, Poly};
use crate::rational::{parse_rational, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `deg f = 2g + 2`, two points at infinity.
    Even,
    /// `deg f = 2g + 1`, one point at infinity.
    Odd,
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(ModelKind::Even),
            "odd" => Ok(ModelKind::Odd),
            other => Err(Error::InvalidInput(format!("unknown model kind {other:?} (expected even or odd)"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Even => "even",
            ModelKind::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    kind: ModelKind,
    genus: usize,
    f: Poly,
}

impl CurveModel {
    pub fn new(kind: ModelKind, genus: usize, coeffs: Vec<Q>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidInput("genus must be positive".into()));
        }
        let f = Poly::new(coeffs);
        let want = match kind {
            ModelKind::Even => 2 * genus + 2,
            ModelKind::Odd => 2 * genus + 1,
        };
        if f.degree() != Some(want) {
            return Err(Error::InvalidInput(format!(
                "{kind} model of genus {genus} needs deg f = {want}, got {}",
                f.deg_i64()
            )));
        }
        if !f.leading().is_one() {
            return Err(Error::NormalizationRequired(format!(
                "f must be monic; leading coefficient is {} (substitute to make it 1)",
                f.leading()
            )));
        }
        if discriminant(&f)?.is_zero() {
            return Err(Error::InvalidInput("f is not squarefree".into()));
        }
        Ok(CurveModel { kind, genus, f })
    }

    /// Builds a model from integer coefficients, lowest degree first, with
    /// the genus read off the degree.
    pub fn from_ints(kind: ModelKind, coeffs: &[i64]) -> Result<Self> {
        let f = Poly::from_ints(coeffs);
        let deg = f.degree().unwrap_or(0);
        let genus = match kind {
            ModelKind::Even => deg.saturating_sub(2) / 2,
            ModelKind::Odd => deg.saturating_sub(1) / 2,
        };
        CurveModel::new(kind, genus, f.coeffs().to_vec())
    }

    /// Parses a line `kind g c_0 c_1 ... c_deg`.
    pub fn parse_line(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let kind: ModelKind = parts.next().ok_or_else(|| Error::InvalidInput("empty curve description".into()))?.parse()?;
        let g: usize = parts
            .next()
            .ok_or_else(|| Error::InvalidInput("missing genus".into()))?
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad genus: {e}")))?;
        let coeffs = parts.map(parse_rational).collect::<Result<Vec<_>>>()?;
        CurveModel::new(kind, g, coeffs)
    }

    /// Parses comma-separated coefficients `c_0,c_1,...` for the given kind.
    pub fn parse_inline(kind: ModelKind, list: &str) -> Result<Self> {
        let coeffs = list.split(',').map(|s| parse_rational(s.trim())).collect::<Result<Vec<_>>>()?;
        let deg = Poly::new(coeffs.clone()).deg_i64();
        let genus = match kind {
            ModelKind::Even if deg >= 4 && deg % 2 == 0 => (deg as usize - 2) / 2,
            ModelKind::Odd if deg >= 3 && deg % 2 == 1 => (deg as usize - 1) / 2,
            _ => return Err(Error::InvalidInput(format!("degree {deg} does not fit a {kind} model"))),
        };
        CurveModel::new(kind, genus, coeffs)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    /// Textual form `kind g c_0 ... c_deg`.
    pub fn to_line(&self) -> String {
        let coeffs: Vec<String> = self.f.coeffs().iter().map(|c| c.to_string()).collect();
        format!("{} {} {}", self.kind, self.genus, coeffs.join(" "))
    }

    /// `None` when the model has good reduction at p in the required sense,
    /// otherwise the reason it does not.
    pub fn reduction_failure(&self, p: Prime) -> Result<Option<String>> {
        if !self.f.is_integral_at(p) {
            return Err(Error::NormalizationRequired(format!(
                "coefficients of f are not integral at {p}; scale x to clear denominators"
            )));
        }
        let disc = discriminant(&self.f)?;
        if reduce_mod_p(&disc, p) == Some(0) {
            return Ok(Some(format!("{p} divides disc(f) = {disc}")));
        }
        if self.kind == ModelKind::Even && p.get() == 2 * self.genus as u64 + 1 {
            return Ok(Some(format!("p = 2g + 1 = {p} is excluded for even models")));
        }
        Ok(None)
    }

    pub fn good_reduction_at(&self, p: Prime) -> Result<bool> {
        Ok(self.reduction_failure(p)?.is_none())
    }

    fn require_good(&self, p: Prime) -> Result<Vec<u64>> {
        if let Some(reason) = self.reduction_failure(p)? {
            return Err(Error::BadReduction { p: p.get(), reason });
        }
        Ok(self.f.reduce(p).expect("integral"))
    }

    /// Square roots of each residue mod p (empty for non-residues).
    fn square_roots(p: u64) -> Vec<Vec<u64>> {
        let mut roots = vec![Vec::new(); p as usize];
        for y in 0..p {
            roots[(y * y % p) as usize].push(y);
        }
        roots
    }

    pub fn count_points_fp(&self, p: Prime) -> Result<PointCounts> {
        let fbar = self.require_good(p)?;
        let pv = p.get();
        let (mut nonw, mut w) = (0u64, 0u64);
        for x in 0..pv {
            let v = eval_mod_p(&fbar, x, pv);
            if v == 0 {
                w += 1;
            } else if legendre(v, pv) == 1 {
                nonw += 2;
            }
        }
        let infinite = match self.kind {
            ModelKind::Even => 2,
            ModelKind::Odd => 1,
        };
        Ok(PointCounts { total: nonw + w + infinite, affine_nonweierstrass: nonw, weierstrass_affine: w, infinite })
    }

    /// One descriptor per F_p point, sorted by (kind, x, y).
    pub fn residue_disks(&self, p: Prime) -> Result<Vec<DiskDescriptor>> {
        let fbar = self.require_good(p)?;
        let pv = p.get();
        let roots = Self::square_roots(pv);
        let mut disks = Vec::new();
        for x in 0..pv {
            let v = eval_mod_p(&fbar, x, pv);
            if v == 0 {
                disks.push(DiskDescriptor { kind: DiskKind::AffineWeierstrass, center: DiskCenter::Affine { x, y: 0 } });
            } else {
                for &y in &roots[v as usize] {
                    disks.push(DiskDescriptor { kind: DiskKind::AffineNonWeierstrass, center: DiskCenter::Affine { x, y } });
                }
            }
        }
        match self.kind {
            ModelKind::Even => {
                disks.push(DiskDescriptor { kind: DiskKind::Infinite, center: DiskCenter::InfinityPlus });
                disks.push(DiskDescriptor { kind: DiskKind::Infinite, center: DiskCenter::InfinityMinus });
            }
            ModelKind::Odd => disks.push(DiskDescriptor { kind: DiskKind::Infinite, center: DiskCenter::Infinity }),
        }
        disks.sort();
        Ok(disks)
    }

    /// Number of F_p points of the Weierstrass subscheme away from infinity.
    pub fn weierstrass_scheme_count(&self, p: Prime) -> Result<u64> {
        Ok(self.count_points_fp(p)?.weierstrass_affine)
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = {} ({} model, genus {})", self.f, self.kind, self.genus)
    }
}

/// Euler's criterion; returns 1, p - 1 or 0.
pub fn legendre(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, (p - 1) / 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointCounts {
    pub total: u64,
    pub affine_nonweierstrass: u64,
    pub weierstrass_affine: u64,
    pub infinite: u64,
}

impl PointCounts {
    /// Loose integer Hasse-Weil check `|N - (p+1)| <= 2g floor(2 sqrt p)`.
    pub fn hasse_weil_ok(&self, p: Prime, genus: usize) -> bool {
        let pv = p.get();
        let s = (4 * pv).isqrt();
        let slack = 2 * genus as u64 * s;
        self.total.abs_diff(pv + 1) <= slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskKind {
    AffineNonWeierstrass,
    AffineWeierstrass,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskCenter {
    Affine { x: u64, y: u64 },
    InfinityPlus,
    InfinityMinus,
    /// The single point at infinity of an odd model.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DiskDescriptor {
    pub kind: DiskKind,
    pub center: DiskCenter,
}

impl DiskDescriptor {
    pub fn affine(&self) -> Option<(u64, u64)> {
        match self.center {
            DiskCenter::Affine { x, y } => Some((x, y)),
            _ => None,
        }
    }
}

impl fmt::Display for DiskDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.center {
            DiskCenter::Affine { x, y } => write!(f, "({x}, {y})"),
            DiskCenter::InfinityPlus => write!(f, "inf+"),
            DiskCenter::InfinityMinus => write!(f, "inf-"),
            DiskCenter::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn good_reduction_examples() {
        let c = CurveModel::from_ints(ModelKind::Odd, &[1, 0, 0, 0, 0, 1]).unwrap();
        assert!(c.good_reduction_at(p(3)).unwrap());
        assert!(!c.good_reduction_at(p(5)).unwrap());
        let e = CurveModel::from_ints(ModelKind::Even, &[1, 1, 0, 0, 1]).unwrap();
        assert_eq!(e.genus(), 1);
        assert!(!e.good_reduction_at(p(3)).unwrap());
    }

    #[test]
    fn counts_and_disks() {
        let c = CurveModel::from_ints(ModelKind::Odd, &[1, 0, 0, 0, 0, 1]).unwrap();
        let n = c.count_points_fp(p(3)).unwrap();
        assert_eq!(n, PointCounts { total: 4, affine_nonweierstrass: 2, weierstrass_affine: 1, infinite: 1 });
        let disks = c.residue_disks(p(3)).unwrap();
        let names: Vec<String> = disks.iter().map(|d| d.to_string()).collect();
        assert_eq!(names, ["(0, 1)", "(0, 2)", "(2, 0)", "inf"]);
        assert_eq!(c.weierstrass_scheme_count(p(3)).unwrap(), 1);
        assert!(matches!(c.count_points_fp(p(5)), Err(Error::BadReduction { .. })));
    }

    #[test]
    fn model_validation() {
        assert!(matches!(CurveModel::from_ints(ModelKind::Odd, &[1, 0, 0, 2]), Err(Error::NormalizationRequired(_))));
        assert!(CurveModel::from_ints(ModelKind::Odd, &[0, 0, 0, 1]).is_err());
        let c = CurveModel::parse_line("even 2 1 0 0 0 0 0 1").unwrap();
        assert_eq!(CurveModel::parse_line(&c.to_line()).unwrap(), c);
        assert_eq!(CurveModel::parse_inline(ModelKind::Odd, "1,1,0,1").unwrap().genus(), 1);
        assert!(CurveModel::parse_inline(ModelKind::Even, "1,1,0,1").is_err());
    }
}
