//! Desk-scale verification of the linear-algebraic and polynomial evidence
//! behind commutator representatives of boundary Dehn twists.
//!
//! The crate is organised along the chain it verifies:
//!
//! - [`linalg_paths`]: paths through commuting pairs in GL⁺(n) ending at the
//!   canonical pair `(r_k^ν ⊕ I, r_i^ν ⊕ I)`, and the negative parity `ν`.
//! - [`spin_lift`]: quaternions, the Clifford algebra `Cl(n)` and the lift of
//!   loops in SO(n) to Spin(n), deciding their class in π₁(SO(n)).
//! - [`local_flows`]: the cutoff flow, linear localization and the collar maps
//!   whose commutator is the boundary twist.
//! - [`complete_intersections`]: exact multihomogeneous polynomials, witness
//!   systems, smoothness probing, involutions and implicit-function charts.
//! - [`pipeline`]: the end-to-end verification run and its JSON report.
//!
//! Data-parallel loops (Monte Carlo scans, point batches) go through
//! [`parallel`], which uses rayon when the `parallel` feature is enabled and
//! falls back to plain iteration otherwise.

pub mod complete_intersections;
pub mod linalg_paths;
pub mod local_flows;
pub mod parallel;
pub mod pipeline;
pub mod smooth;
pub mod spin_lift;

pub use nalgebra::Complex;

/// Dense real matrix used for every GL⁺(n)/SO(n) computation.
pub type SquareMatrix = nalgebra::DMatrix<f64>;
/// Dense complex matrix.
pub type ComplexMatrix = nalgebra::DMatrix<Complex<f64>>;
/// Real vector.
pub type Vector = nalgebra::DVector<f64>;
