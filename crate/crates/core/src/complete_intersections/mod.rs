//! Multihomogeneous polynomial systems and the symmetric complete
//! intersections they cut out.
//!
//! Polynomials carry exact rational coefficients ([`Polynomial`]) and are
//! grouped into factors of a product of projective spaces
//! ([`MultiHomogeneousPolynomial`], [`PolySystem`]). Symbolic checks
//! (symmetry conditions, involution invariance, the witness identity) run in
//! exact arithmetic; smoothness probing, charts and differentials run in
//! complex floating point.

mod catalog;
mod chart;
mod exact;
mod numeric;
mod parity;
mod parse;
mod point;
mod poly;
mod scan;
mod symmetry;
mod witness;

pub use catalog::{family_catalog, CatalogEntry, Family, PI_SURROGATE};
pub use chart::{
    chart_newton, differentials_at_fixed_point, local_action_check, Chart, Differentials,
    LocalActionReport, DEFAULT_CHART_RADIUS,
};
pub use exact::GaussianRational;
pub use numeric::{jacobian_minors, JacobianMinors, NumericSystem, ZERO_TOL};
pub use parity::parity_condition;
pub use parse::{parse_poly, parse_system};
pub use point::{involution_a, involution_c, involution_maps, ProjectivePoint};
pub use poly::{Monomial, MultiHomogeneousPolynomial, PolySystem, Polynomial, VarIndex};
pub use scan::{
    smoothness_scan, smoothness_scan_with, ScanFailure, ScanOptions, SmoothnessReport,
    SpecialPointResult, DEFAULT_SIGMA_THRESHOLD,
};
pub use symmetry::{
    invariance_check, symmetry_conditions, InvarianceReport, SymmetryConditions, SymmetryReport,
};
pub use witness::{kronecker_check, kronecker_witness_check, witness_qa};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("polynomial is not multihomogeneous: term {term} has degrees {found:?}, expected {expected:?}")]
    NotHomogeneous { term: String, found: Vec<u32>, expected: Vec<u32> },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("bad degrees: {0}")]
    BadDegrees(String),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("point has a zero factor")]
    ZeroFactor,
    #[error("no Gauss-Newton start converged onto the zero set ({0} draws)")]
    NoConvergentSamples(usize),
    #[error("chart block is singular at the base point (condition number {0:e})")]
    SingularChartBlock(f64),
    #[error("base point is not on the zero set (residual {0:e})")]
    BasePointNotOnVariety(f64),
    #[error("Newton iteration diverged (residual {0:e})")]
    NewtonDivergence(f64),
    #[error("free coordinates (norm {norm}) outside the chart radius {radius}")]
    FreeOutsideChart { norm: f64, radius: f64 },
    #[error("finite-difference cross-check of the differentials failed (residual {0:e})")]
    DifferentialMismatch(f64),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("invalid family parameters: {0}")]
    BadParams(String),
}

pub type Result<T> = std::result::Result<T, PolyError>;
