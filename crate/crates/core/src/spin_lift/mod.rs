//! Lifting loops in SO(n) to Spin(n).
//!
//! A loop in SO(n) based at the identity lifts to a path in Spin(n) starting
//! at 1 and ending at ±1; the end sign is its class in π₁(SO(n)) = ℤ/2.
//! [`lift_loop`] computes it in the Clifford algebra `Cl(n)` with
//! `e_i² = −1`, whose even part for `n = 3` is the quaternion algebra via
//! `e₂e₃ ↦ i`, `e₃e₁ ↦ j`, `e₁e₂ ↦ k`.

mod clifford;
mod loops;
mod quaternion;

pub use clifford::{bivector_exp, CliffordElement, MAX_CLIFFORD_DIM};
pub use loops::{
    generator_loops, lift_loop, lift_loop_detailed, so_log_small, spin_obstruction_of_pair,
    GeneratorLoops, LiftOutcome, SOLoop, DEFAULT_LOOP_GRID, SMALL_STEP,
};
pub use quaternion::{
    quaternion_commutator_witness, quaternion_rotation, Quaternion, UnitQuaternion,
};

use thiserror::Error;

use crate::linalg_paths::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("quaternion norm {0} differs from 1")]
    NotUnit(f64),
    #[error("step ‖R − I‖_F = {0} exceeds the small-step bound")]
    StepTooLarge(f64),
    #[error("lifted loop does not close: scalar {scalar}, other blades {rest:e}")]
    NotClosed { scalar: f64, rest: f64 },
    #[error("dimension {0} is too small (need n >= 3)")]
    DimensionTooSmall(usize),
    #[error("Clifford dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, SpinError>;
