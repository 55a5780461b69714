use super::cutoff::CutoffFunction;
use super::diffeo::{NumericDiffeo, FD_STEP};
use super::flow::DOMAIN_RADIUS;
use super::{FlowError, Result};
use crate::Vector;

/// Radial sample points per axis direction in [`embedding_check`].
pub const RADIAL_POINTS: usize = 32;

const MIN_EPS: f64 = 1e-9;

/// `v ↦ f(v) − t·χ(|v|/ε)·(f(v) − Df₀·v)`, checked by [`embedding_check`].
pub fn localized_map(f: &NumericDiffeo, eps: f64, t: f64) -> Result<NumericDiffeo> {
    let map = unchecked_localized(f, eps, t)?;
    embedding_check(&map, eps)?;
    Ok(map)
}

fn unchecked_localized(f: &NumericDiffeo, eps: f64, t: f64) -> Result<NumericDiffeo> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FlowError::InvalidArgument(format!("eps = {eps} outside (0, 1)")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(FlowError::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    let n = f.dim();
    let origin = Vector::zeros(n);
    let f0 = f.eval(&origin);
    if f0.norm() > 1e-12 {
        return Err(FlowError::InvalidArgument(format!("f(0) = {f0:?} is not the origin")));
    }
    let df0 = f.jacobian_at(&origin);
    let g = f.clone();
    let label = format!("{}_lin(eps={eps}, t={t})", f.label());
    let mut out = NumericDiffeo::new(n, label, move |v| {
        let fv = g.eval(v);
        let weight = t * CutoffFunction.value(v.norm() / eps);
        if weight == 0.0 {
            return fv;
        }
        let lin = &df0 * v;
        if weight == 1.0 {
            return lin;
        }
        &fv - (&fv - lin) * weight
    });
    if f.is_identity_near_boundary() && 2.0 * eps <= 1.0 {
        out = out.identity_near_boundary();
    }
    Ok(out)
}

/// Localizes `f` at `eps` and evaluates at `v`.
pub fn linear_localize(f: &NumericDiffeo, eps: f64, t: f64, v: &Vector) -> Result<Vector> {
    Ok(localized_map(f, eps, t)?.eval(v))
}

/// Radial sample points along `±e_i`: a grid over `[0, 3)` and a grid over
/// the transition annulus `[0, 2ε]`.
fn radial_samples(n: usize, eps: f64) -> Vec<Vector> {
    let mut out = Vec::with_capacity(4 * n * RADIAL_POINTS);
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            for j in 0..RADIAL_POINTS {
                for r in [
                    DOMAIN_RADIUS * j as f64 / RADIAL_POINTS as f64,
                    2.0 * eps * (j as f64 + 0.5) / RADIAL_POINTS as f64,
                ] {
                    let mut v = Vector::zeros(n);
                    v[axis] = sign * r;
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Checks that the finite-difference Jacobian determinant is positive on
/// the radial sample grid; returns the smallest determinant seen.
pub fn embedding_check(map: &NumericDiffeo, eps: f64) -> Result<f64> {
    let mut min_det = f64::INFINITY;
    for v in radial_samples(map.dim(), eps) {
        let det = map.fd_jacobian(&v, FD_STEP * eps.min(1.0)).determinant();
        if !(det > 0.0) {
            return Err(FlowError::NotEmbedding { eps, det });
        }
        min_det = min_det.min(det);
    }
    Ok(min_det)
}

/// Halves `ε` from `0.5` until the localized maps for
/// `t ∈ {¼, ½, ¾, 1}` all pass [`embedding_check`].
pub fn select_epsilon(f: &NumericDiffeo) -> Result<f64> {
    let mut eps = 0.5;
    let mut last_det = f64::NAN;
    while eps >= MIN_EPS {
        let ok = [0.25, 0.5, 0.75, 1.0].iter().all(|&t| {
            match unchecked_localized(f, eps, t).and_then(|m| embedding_check(&m, eps)) {
                Ok(_) => true,
                Err(FlowError::NotEmbedding { det, .. }) => {
                    last_det = det;
                    false
                }
                Err(_) => false,
            }
        });
        if ok {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Err(FlowError::NotEmbedding { eps, det: last_det })
}
