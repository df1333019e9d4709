//! Effective bounds for rational points on hyperelliptic curves via
//! Coleman integrals, differential operators and Newton polygons.

pub mod bounds;
pub mod chart;
pub mod coleman;
pub mod diffops;
pub mod error;
pub mod funcfield;
pub mod hyperelliptic;
pub mod linalg;
pub mod poly;
pub mod padics;
pub mod rational;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use padics::{kappa, Prime, Valuation};
pub use rational::Q;
pub use scalar::{Coeff, QuadScalar};
pub use series::{LaurentSeries, NewtonPolygon, TruncatedSeries, ValuationFloor};
