//! Paths through commuting pairs in GL⁺(n).
//!
//! Given commuting `A, C` with positive determinant, [`synth_commuting_path`]
//! builds smooth paths `α, γ` through commuting matrices with
//! `α(0) = A`, `γ(0) = C` and `(α(1), γ(1)) = (r_k^ν ⊕ I, r_i^ν ⊕ I)`, where
//! `ν` is [`negative_parity`]. The path runs through four stages: removal of
//! the nilpotent parts (`S`), radial rescaling of the spectra onto the unit
//! circle (`N`), conjugation into block form (`O`) and simultaneous rotation
//! of the SO(2) blocks to the identity (`R`).

mod eigen;
mod matrix;
mod pair;
mod path;
mod synth;

pub use eigen::{common_eigenstructure, default_cluster_tol, negative_parity, EigenBlock, EigenStructure};
pub use matrix::{
    canonical_ri, canonical_rk, commutator_residual, cos_sin_pi, direct_sum, embed_top_left,
    group_commutator, is_special_orthogonal, max_abs, orthogonal_log, polar_decomposition,
    rotation_i, rotation_k, so_residual,
};
pub use pair::{
    canonical_pair, standard_symplectic_form, symplectic_parity_check, CommutingPair,
    DEFAULT_COMMUTE_TOL,
};
pub use path::{path_commutator_residual, FnPath, MatrixPath, SampledPath, Stage, StageLabel};
pub use synth::{
    synth_commuting_path, synth_commuting_path_with_tol, CommutingPaths, DEFAULT_GRID, MIN_GRID,
};

use thiserror::Error;

/// Errors raised by the commuting-path machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("det({which}) = {det:e} is not positive")]
    NotOrientationPreserving { which: &'static str, det: f64 },
    #[error("commutator residual {residual:e} exceeds tolerance {tol:e}")]
    NonCommuting { residual: f64, tol: f64 },
    #[error("eigenvalue clusters at tolerance {tol:e} and {half:e} disagree", half = tol / 2.0)]
    ClusterAmbiguity { tol: f64 },
    #[error("invariant subspace computation failed: {0}")]
    Eigenstructure(String),
    #[error("dimension {0} is too small (need n >= 3)")]
    DimensionTooSmall(usize),
    #[error("parity must be 0 or 1, got {0}")]
    InvalidParity(u8),
    #[error("grid must be at least {min}, got {got}")]
    GridTooCoarse { min: usize, got: usize },
    #[error("path degenerate at t = {t}: det = {det:e}")]
    PathDegenerate { t: f64, det: f64 },
    #[error("sample grids of the two paths differ")]
    GridMismatch,
    #[error("skew form not preserved (residual {0:e})")]
    NotSymplectic(f64),
    #[error("symplectic check needs even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix logarithm failed: {0}")]
    Logarithm(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
