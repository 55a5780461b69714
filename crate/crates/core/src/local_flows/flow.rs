use super::cutoff::CutoffFunction;
use super::diffeo::NumericDiffeo;
use super::{FlowError, Result};
use crate::linalg_paths::MatrixPath;
use crate::Vector;

/// Radius of the ball on which the deformations live.
pub const DOMAIN_RADIUS: f64 = 3.0;

/// Tolerances of the adaptive Dormand–Prince integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size, so short bursts of the field between
    /// quiet stretches are never stepped over.
    pub max_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { atol: 1e-10, rtol: 1e-10, max_steps: 100_000, max_step: 1.0 / 64.0 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = field(s, y)` from `s0` to `s1` with adaptive RK45.
/// `guard` is called on every accepted state and may abort the integration.
pub(crate) fn integrate(
    field: impl Fn(f64, &Vector) -> Vector,
    y0: Vector,
    s0: f64,
    s1: f64,
    opts: FlowOptions,
    guard: impl Fn(f64, &Vector) -> Result<()>,
) -> Result<Vector> {
    if s1 == s0 {
        return Ok(y0);
    }
    let direction = (s1 - s0).signum();
    let span = (s1 - s0).abs();
    // Near the origin the flow is linear; scaling the absolute tolerance with
    // the initial size keeps the relative accuracy there.
    let atol = opts.atol * y0.norm().min(1.0).max(1e-300);
    let mut s = s0;
    let mut y = y0;
    let mut h = span.min(0.01).min(opts.max_step);
    let mut k: Vec<Vector> = Vec::with_capacity(7);
    for _ in 0..opts.max_steps {
        let remaining = (s1 - s) * direction;
        if remaining <= 0.0 {
            return Ok(y);
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        k.clear();
        for stage in 0..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    ys.axpy(direction * step * a, kj, 1.0);
                }
            }
            k.push(field(s + direction * step * C[stage], &ys));
        }
        let mut y5 = y.clone();
        let mut err = Vector::zeros(y.len());
        for (i, ki) in k.iter().enumerate() {
            y5.axpy(direction * step * B5[i], ki, 1.0);
            err.axpy(direction * step * (B5[i] - B4[i]), ki, 1.0);
        }
        let mut ratio: f64 = 0.0;
        for i in 0..y.len() {
            let scale = atol + opts.rtol * y[i].abs().max(y5[i].abs());
            ratio = ratio.max(err[i].abs() / scale);
        }
        if !ratio.is_finite() {
            return Err(FlowError::IntegratorFailure(format!("non-finite error estimate at s = {s}")));
        }
        if ratio <= 1.0 {
            s = if last { s1 } else { s + direction * step };
            y = y5;
            guard(s, &y)?;
            if last {
                return Ok(y);
            }
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = (step * factor).min(opts.max_step);
        if h < 1e-14 * span {
            return Err(FlowError::IntegratorFailure(format!("step size underflow at s = {s}")));
        }
    }
    Err(FlowError::IntegratorFailure("too many steps".into()))
}

/// Flows `v` along `χ(|u|)·ρ'(s)ρ(s)⁻¹·u` from `s = 0` to `s = t`.
pub fn flow_point(rho: &dyn MatrixPath, t: f64, v: &Vector, opts: FlowOptions) -> Result<Vector> {
    if v.len() != rho.dim() {
        return Err(FlowError::DimensionMismatch(rho.dim(), v.len()));
    }
    if v.norm() >= DOMAIN_RADIUS {
        return Err(FlowError::LeftDomain { s: 0.0, radius: v.norm() });
    }
    let chi = CutoffFunction;
    let field = |s: f64, u: &Vector| -> Vector {
        let weight = chi.value(u.norm());
        if weight == 0.0 {
            return Vector::zeros(u.len());
        }
        let value = rho.value(s);
        let w = value.lu().solve(u).unwrap_or_else(|| Vector::from_element(u.len(), f64::NAN));
        rho.derivative(s) * w * weight
    };
    let guard = |s: f64, u: &Vector| -> Result<()> {
        let radius = u.norm();
        if !(radius < DOMAIN_RADIUS) {
            return Err(FlowError::LeftDomain { s, radius });
        }
        Ok(())
    };
    integrate(field, v.clone(), 0.0, t, opts, guard)
}

/// `f` precomposed with the time-`t` flow of the cut-off field of `ρ`.
pub fn deform_by_flow(f: &NumericDiffeo, rho: &dyn MatrixPath, t: f64, v: &Vector) -> Result<Vector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(FlowError::InvalidArgument(format!("flow time {t} outside [0, 1]")));
    }
    let u = flow_point(rho, t, v, FlowOptions::default())?;
    Ok(f.eval(&u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg_paths::{embed_top_left, rotation_k, FnPath};
    use crate::SquareMatrix;

    #[test]
    fn exponential_growth_matches() {
        let y = integrate(
            |_, y| y.clone(),
            Vector::from_vec(vec![1.0]),
            0.0,
            1.0,
            FlowOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn rotation_inside_and_fixed_outside() {
        let rho = FnPath::new(4, (0.0, 1.0), |t| embed_top_left(&rotation_k(t), 4));
        let id = NumericDiffeo::identity(4);
        let v = Vector::from_vec(vec![0.1, 0.0, 0.0, 0.0]);
        let out = deform_by_flow(&id, &rho, 1.0, &v).unwrap();
        assert!((out - Vector::from_vec(vec![-0.1, 0.0, 0.0, 0.0])).norm() < 1e-9);
        let far = Vector::from_vec(vec![0.0, 2.5, 0.0, 0.0]);
        assert_eq!(deform_by_flow(&id, &rho, 1.0, &far).unwrap(), far);
        let constant = FnPath::new(4, (0.0, 1.0), |_| SquareMatrix::identity(4, 4));
        let w = Vector::from_vec(vec![0.3, 1.2, -0.4, 0.2]);
        assert_eq!(deform_by_flow(&id, &constant, 0.7, &w).unwrap(), w);
    }

    #[test]
    fn outside_ball_is_rejected() {
        let rho = FnPath::new(3, (0.0, 1.0), rotation_k);
        let v = Vector::from_vec(vec![3.0, 0.0, 0.0]);
        assert!(matches!(
            flow_point(&rho, 1.0, &v, FlowOptions::default()),
            Err(FlowError::LeftDomain { .. })
        ));
    }
}
