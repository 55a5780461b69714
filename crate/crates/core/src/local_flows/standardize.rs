use std::sync::Arc;

use super::diffeo::{fd_jacobian, NumericDiffeo, FD_STEP};
use super::flow::{flow_point, FlowOptions};
use super::localize::{localized_map, select_epsilon};
use super::{FlowError, Result};
use crate::linalg_paths::{
    canonical_pair, max_abs, synth_commuting_path, CommutingPair, CommutingPaths, FnPath,
    MatrixPath, SampledPath, DEFAULT_GRID,
};
use crate::{SquareMatrix, Vector};

/// Tolerance on the Jacobian at the origin of the deformed local model.
const MODEL_TOL: f64 = 1e-5;

/// Output of [`standardize_pair`] / [`standardize_diffeos`].
#[derive(Debug, Clone)]
pub struct Standardization {
    pub nu: u8,
    /// The boundary-twist construction needs `ν = 1`; this flags `ν = 0`.
    pub parity_zero: bool,
    pub paths: CommutingPaths,
    /// `A⁻¹α` and `C⁻¹γ`, the paths fed to the flow deformation.
    pub rho_a: SampledPath,
    pub rho_c: SampledPath,
    /// Radius used for the linear localization.
    pub epsilon: f64,
    /// Finite-difference Jacobians at 0 of the deformed, localized maps.
    pub local_model: (SquareMatrix, SquareMatrix),
    /// Distance of `local_model` from `(r_k^ν ⊕ I, r_i^ν ⊕ I)`.
    pub model_residual: f64,
}

/// Standardizes the linear maps given by a pair of commuting differentials.
pub fn standardize_pair(a_jac: &SquareMatrix, c_jac: &SquareMatrix) -> Result<Standardization> {
    standardize_diffeos(
        &NumericDiffeo::linear(a_jac.clone()),
        &NumericDiffeo::linear(c_jac.clone()),
        DEFAULT_GRID,
    )
}

fn relative_path(paths_value: SampledPath, start_inv: SquareMatrix, grid: usize) -> SampledPath {
    let n = start_inv.nrows();
    let stages = paths_value.stages().to_vec();
    let f = FnPath::new(n, (0.0, 1.0), move |t| &start_inv * paths_value.value(t));
    SampledPath::from_path(Arc::new(f), grid, stages)
}

/// Localizes both maps, deforms them along `A⁻¹α`, `C⁻¹γ` and checks that
/// the differentials at the origin become the canonical pair.
pub fn standardize_diffeos(f_a: &NumericDiffeo, f_c: &NumericDiffeo, grid: usize) -> Result<Standardization> {
    let n = f_a.dim();
    if f_c.dim() != n {
        return Err(FlowError::DimensionMismatch(n, f_c.dim()));
    }
    let origin = Vector::zeros(n);
    let a = f_a.jacobian_at(&origin);
    let c = f_c.jacobian_at(&origin);
    let pair = CommutingPair::with_relative_tol(a.clone(), c.clone())?;
    let paths = synth_commuting_path(&pair, grid)?;
    let inv = |m: &SquareMatrix| {
        m.clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| FlowError::InvalidArgument("differential is singular".into()))
    };
    let rho_a = relative_path(paths.alpha.clone(), inv(&a)?, grid);
    let rho_c = relative_path(paths.gamma.clone(), inv(&c)?, grid);
    let epsilon = select_epsilon(f_a)?.min(select_epsilon(f_c)?);
    let model = |f: &NumericDiffeo, rho: &SampledPath| -> Result<SquareMatrix> {
        let g = localized_map(f, epsilon, 1.0)?;
        let h = FD_STEP * epsilon;
        let mut failure = None;
        let jac = fd_jacobian(n, &origin, h, |v| match flow_point(rho, 1.0, v, FlowOptions::default()) {
            Ok(u) => g.eval(&u),
            Err(e) => {
                failure = Some(e);
                Vector::zeros(n)
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(jac),
        }
    };
    let model_a = model(f_a, &rho_a)?;
    let model_c = model(f_c, &rho_c)?;
    let canonical = canonical_pair(n, paths.nu)?;
    let model_residual = max_abs(&(&model_a - canonical.a())).max(max_abs(&(&model_c - canonical.c())));
    if !(model_residual <= MODEL_TOL) {
        return Err(FlowError::InvalidArgument(format!(
            "deformed local model misses the canonical pair by {model_residual:e}"
        )));
    }
    Ok(Standardization {
        nu: paths.nu,
        parity_zero: paths.nu == 0,
        paths,
        rho_a,
        rho_c,
        epsilon,
        local_model: (model_a, model_c),
        model_residual,
    })
}
