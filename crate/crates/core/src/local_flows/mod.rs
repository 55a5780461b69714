//! Local deformations near a common fixed point and the collar twist.
//!
//! A diffeomorphism `f` of `B₃ ⊂ ℝⁿ` is deformed in two ways: by the flow of
//! the cut-off vector field `χ(|u|)·ρ'(s)ρ(s)⁻¹·u` for a matrix path `ρ`
//! ([`deform_by_flow`]), and by interpolating towards its linearization on a
//! small ball ([`linear_localize`]). On the collar `1 ≤ |v| ≤ 4` the maps
//! `a°(v) = ρ_k(|v|)·v`, `c°(v) = ρ_i(|v|)·v` are built from a
//! [`TwistProfile`]; their commutator loop is the boundary twist.

mod collar;
mod cutoff;
mod diffeo;
mod flow;
mod localize;
mod standardize;

pub use collar::{
    collar_commutator_class, collar_commutator_loop, collar_maps, twist_profile, ProfileFn,
    TwistProfile, COLLAR_INNER, COLLAR_OUTER,
};
pub use cutoff::{chi, CutoffFunction};
pub use diffeo::{NumericDiffeo, FD_STEP};
pub use flow::{deform_by_flow, flow_point, FlowOptions};
pub use localize::{embedding_check, linear_localize, localized_map, select_epsilon, RADIAL_POINTS};
pub use standardize::{standardize_diffeos, standardize_pair, Standardization};

use thiserror::Error;

use crate::linalg_paths::LinalgError;
use crate::spin_lift::SpinError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("radius {0} is negative")]
    NegativeRadius(f64),
    #[error("flow left B_3 at s = {s} (|u| = {radius})")]
    LeftDomain { s: f64, radius: f64 },
    #[error("integrator failure: {0}")]
    IntegratorFailure(String),
    #[error("localized map is not an embedding at eps = {eps}: det = {det:e}")]
    NotEmbedding { eps: f64, det: f64 },
    #[error("dimension {0} is too small (need n >= 3)")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid twist profile: {0}")]
    InvalidProfile(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

pub type Result<T> = std::result::Result<T, FlowError>;
