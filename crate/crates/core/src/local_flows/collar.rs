use std::fmt;
use std::sync::Arc;

use super::diffeo::NumericDiffeo;
use super::{FlowError, Result};
use crate::linalg_paths::{
    canonical_ri, canonical_rk, embed_top_left, group_commutator, rotation_i, rotation_k,
    so_residual,
};
use crate::smooth::smooth_step;
use crate::spin_lift::{lift_loop, SOLoop};
use crate::{SquareMatrix, Vector};

/// Inner and outer radius of the collar on which the twist is examined.
pub const COLLAR_INNER: f64 = 1.0;
pub const COLLAR_OUTER: f64 = 4.0;

/// A map `[1, ∞) → SO(n)`.
pub type ProfileFn = Arc<dyn Fn(f64) -> SquareMatrix + Send + Sync>;

/// Paths `ρ_k, ρ_i : [1, ∞) → SO(n)` equal to `I` on `[1, 2]` and constant on
/// `[3, ∞)`.
#[derive(Clone)]
pub struct TwistProfile {
    n: usize,
    grid: usize,
    rho_k: ProfileFn,
    rho_i: ProfileFn,
}

impl fmt::Debug for TwistProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistProfile").field("n", &self.n).field("grid", &self.grid).finish()
    }
}

/// `R(s(t − 2)) ⊕ I` on `[2, 3]`, `I` before and `R(1) ⊕ I` after.
fn standard_rho(n: usize, generator: fn(f64) -> SquareMatrix, t: f64) -> SquareMatrix {
    if t <= 2.0 {
        SquareMatrix::identity(n, n)
    } else if t >= 3.0 {
        embed_top_left(&generator(1.0), n)
    } else {
        embed_top_left(&generator(smooth_step(t - 2.0)), n)
    }
}

impl TwistProfile {
    /// Custom profile; the invariants are checked on `grid` samples per unit
    /// length of `[1, 4]`.
    pub fn custom(n: usize, grid: usize, rho_k: ProfileFn, rho_i: ProfileFn) -> Result<Self> {
        if n < 3 {
            return Err(FlowError::DimensionTooSmall(n));
        }
        let profile = Self { n, grid: grid.max(1), rho_k, rho_i };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        let id = SquareMatrix::identity(self.n, self.n);
        let steps = 3 * self.grid;
        let ends = (self.rho_k(3.0), self.rho_i(3.0));
        for m in 0..=steps {
            let t = COLLAR_INNER + (COLLAR_OUTER - COLLAR_INNER) * m as f64 / steps as f64;
            for (name, rho, end) in [("rho_k", self.rho_k(t), &ends.0), ("rho_i", self.rho_i(t), &ends.1)] {
                if rho.nrows() != self.n || rho.ncols() != self.n {
                    return Err(FlowError::DimensionMismatch(self.n, rho.nrows()));
                }
                let res = so_residual(&rho);
                if !(res <= 1e-10) {
                    return Err(FlowError::InvalidProfile(format!(
                        "{name}({t}) is not special orthogonal (residual {res:e})"
                    )));
                }
                if t <= 2.0 && rho != id {
                    return Err(FlowError::InvalidProfile(format!("{name}({t}) is not the identity")));
                }
                if t >= 3.0 && &rho != end {
                    return Err(FlowError::InvalidProfile(format!("{name} is not constant on [3, ∞)")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn rho_k(&self, t: f64) -> SquareMatrix {
        (self.rho_k)(t)
    }

    pub fn rho_i(&self, t: f64) -> SquareMatrix {
        (self.rho_i)(t)
    }

    /// Whether the profile ends at `(r_k ⊕ I, r_i ⊕ I)`.
    pub fn ends_at_canonical_pair(&self) -> bool {
        self.rho_k(3.0) == canonical_rk(self.n) && self.rho_i(3.0) == canonical_ri(self.n)
    }
}

/// The standard profile: `R_k`, `R_i` reparametrized by the smooth step from
/// `[2, 3]` onto `[0, 1]`.
pub fn twist_profile(n: usize, grid: usize) -> Result<TwistProfile> {
    if n < 3 {
        return Err(FlowError::DimensionTooSmall(n));
    }
    TwistProfile::custom(
        n,
        grid,
        Arc::new(move |t| standard_rho(n, rotation_k, t)),
        Arc::new(move |t| standard_rho(n, rotation_i, t)),
    )
}

fn radial_map(n: usize, label: &str, rho: ProfileFn) -> NumericDiffeo {
    let jac_rho = rho.clone();
    NumericDiffeo::new(n, label, move |v: &Vector| rho(v.norm()) * v)
        .with_jacobian(move |v: &Vector| {
            // D(ρ(|v|)v) = ρ(|v|) + ρ'(|v|)·v·vᵀ/|v|.
            let r = v.norm();
            let h = 1e-6;
            let d_rho = (jac_rho(r + h) - jac_rho(r - h)) / (2.0 * h);
            jac_rho(r) + d_rho * v * v.transpose() / r.max(f64::MIN_POSITIVE)
        })
        .identity_near_boundary()
}

/// `a°(v) = ρ_k(|v|)·v` and `c°(v) = ρ_i(|v|)·v` on the collar.
pub fn collar_maps(profile: &TwistProfile) -> (NumericDiffeo, NumericDiffeo) {
    (
        radial_map(profile.n, "a°", profile.rho_k.clone()),
        radial_map(profile.n, "c°", profile.rho_i.clone()),
    )
}

/// The loop `t ↦ [ρ_k(t), ρ_i(t)]`, `t ∈ [1, 4]`, reparametrized onto `[0, 1]`.
pub fn collar_commutator_loop(profile: &TwistProfile, grid: usize) -> Result<SOLoop> {
    let loop_ = SOLoop::from_fn(grid, |u| {
        let t = COLLAR_INNER + (COLLAR_OUTER - COLLAR_INNER) * u;
        group_commutator(&profile.rho_k(t), &profile.rho_i(t)).expect("rotations are invertible")
    })?;
    Ok(loop_)
}

/// Lift sign of the collar commutator loop: `−1` when it generates π₁(SO(n)).
pub fn collar_commutator_class(profile: &TwistProfile, grid: usize) -> Result<i8> {
    Ok(lift_loop(&collar_commutator_loop(profile, grid)?)?)
}
