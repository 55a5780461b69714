use std::sync::Arc;

use super::clifford::{bivector_exp, CliffordElement, MAX_CLIFFORD_DIM};
use super::{Result, SpinError};
use crate::linalg_paths::{
    embed_top_left, group_commutator, max_abs, negative_parity, rotation_i, rotation_k,
    so_residual, CommutingPair, FnPath, SampledPath, Stage, StageLabel,
};
use crate::SquareMatrix;

/// Bound on `‖R_{m+1} − R_m‖_F` between consecutive loop samples.
pub const SMALL_STEP: f64 = 0.5;

const SO_TOL: f64 = 1e-9;
const CLOSE_TOL: f64 = 1e-6;

/// Grid used by [`spin_obstruction_of_pair`].
pub const DEFAULT_LOOP_GRID: usize = 2048;

/// A sampled closed loop in SO(n).
#[derive(Debug, Clone, PartialEq)]
pub struct SOLoop {
    n: usize,
    samples: Vec<(f64, SquareMatrix)>,
}

impl SOLoop {
    /// Validates special orthogonality, closure and the small-step bound.
    pub fn new(samples: Vec<(f64, SquareMatrix)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(SpinError::InvalidLoop("need at least two samples".into()));
        }
        let n = samples[0].1.nrows();
        if n > MAX_CLIFFORD_DIM {
            return Err(SpinError::DimensionTooLarge(n));
        }
        for (t, m) in &samples {
            if m.nrows() != n || m.ncols() != n {
                return Err(SpinError::InvalidLoop(format!("sample at t = {t} has wrong shape")));
            }
            let res = so_residual(m);
            if !(res <= SO_TOL) {
                return Err(SpinError::InvalidLoop(format!(
                    "sample at t = {t} is not special orthogonal (residual {res:e})"
                )));
            }
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(SpinError::InvalidLoop("sample times must increase".into()));
            }
            let step = (&w[1].1 - &w[0].1).norm();
            if step > SMALL_STEP {
                return Err(SpinError::StepTooLarge(step));
            }
        }
        let closure = max_abs(&(&samples[0].1 - &samples[samples.len() - 1].1));
        if closure > SO_TOL {
            return Err(SpinError::InvalidLoop(format!("loop not closed (gap {closure:e})")));
        }
        Ok(Self { n, samples })
    }

    /// Samples `f` at `grid + 1` uniform times in `[0, 1]`.
    pub fn from_fn(grid: usize, f: impl Fn(f64) -> SquareMatrix) -> Result<Self> {
        let grid = grid.max(1);
        let samples = (0..=grid)
            .map(|m| {
                let t = m as f64 / grid as f64;
                (t, f(t))
            })
            .collect();
        Self::new(samples)
    }

    /// Constant loop at the identity.
    pub fn constant(n: usize, grid: usize) -> Result<Self> {
        Self::from_fn(grid, |_| SquareMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[(f64, SquareMatrix)] {
        &self.samples
    }

    /// Runs `self`, then `other`, reparametrized onto `[0, 1]`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.samples.len() - 1, other.samples.len() - 1);
        let total = (a + b) as f64;
        let mut samples: Vec<(f64, SquareMatrix)> = Vec::with_capacity(a + b + 1);
        for (m, (_, r)) in self.samples.iter().enumerate() {
            samples.push((m as f64 / total, r.clone()));
        }
        for (m, (_, r)) in other.samples.iter().enumerate().skip(1) {
            samples.push(((a + m) as f64 / total, r.clone()));
        }
        // The junction sample belongs to both loops.
        let junction = max_abs(&(self.samples[a].1.clone() - &other.samples[0].1));
        if junction > SO_TOL {
            return Err(SpinError::InvalidLoop(format!("loops not based at one point (gap {junction:e})")));
        }
        Self::new(samples)
    }

    /// The same loop traversed backwards.
    pub fn reverse(&self) -> Self {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|(t, r)| (1.0 - t, r.clone()))
            .collect();
        Self { n: self.n, samples }
    }

    /// `t ↦ Q R(t) Qᵀ`.
    pub fn conjugate_by(&self, q: &SquareMatrix) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|(t, r)| (*t, q * r * q.transpose()))
            .collect();
        Self::new(samples)
    }
}

/// Logarithm of an orthogonal matrix near the identity by the series of
/// `log(I + X)`, skew-symmetrized.
pub fn so_log_small(r: &SquareMatrix) -> Result<SquareMatrix> {
    let n = r.nrows();
    let id = SquareMatrix::identity(n, n);
    let x = r - &id;
    let size = x.norm();
    if size > SMALL_STEP {
        return Err(SpinError::StepTooLarge(size));
    }
    let mut sum = SquareMatrix::zeros(n, n);
    let mut power = id;
    for k in 1..=200 {
        power = &power * &x;
        let term = &power / k as f64;
        if k % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term.norm() < 1e-17 {
            break;
        }
    }
    Ok((&sum - sum.transpose()) * 0.5)
}

/// Result of lifting a loop, with the closure diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftOutcome {
    pub sign: i8,
    /// Scalar blade of the lifted endpoint.
    pub scalar: f64,
    /// Largest non-scalar blade of the lifted endpoint.
    pub non_scalar: f64,
    /// `max(|scalar − sign|, non_scalar)`.
    pub closure_residual: f64,
}

/// Lifts `loop_` to Spin(n) step by step and returns the endpoint sign:
/// `−1` if the loop generates π₁(SO(n)), `+1` if it is null-homotopic.
pub fn lift_loop(loop_: &SOLoop) -> Result<i8> {
    Ok(lift_loop_detailed(loop_)?.sign)
}

/// [`lift_loop`] with closure diagnostics.
pub fn lift_loop_detailed(loop_: &SOLoop) -> Result<LiftOutcome> {
    let n = loop_.dim();
    let base_t = loop_.samples[0].1.transpose();
    let mut rotor = CliffordElement::scalar(n, 1.0)?;
    let mut prev = SquareMatrix::identity(n, n);
    for (_, r) in loop_.samples.iter().skip(1) {
        let current = r * &base_t;
        let delta = &current * prev.transpose();
        let omega = so_log_small(&delta)?;
        let step = bivector_exp(&CliffordElement::bivector_from_skew(&omega)?);
        rotor = rotor.mul(&step);
        prev = current;
    }
    let scalar = rotor.scalar_part();
    let non_scalar = rotor.non_scalar_max();
    let sign: i8 = if scalar < 0.0 { -1 } else { 1 };
    let closure_residual = (scalar - f64::from(sign)).abs().max(non_scalar);
    if closure_residual > CLOSE_TOL {
        return Err(SpinError::NotClosed { scalar, rest: non_scalar });
    }
    Ok(LiftOutcome { sign, scalar, non_scalar, closure_residual })
}

/// `R_k(t) ⊕ I`, `R_i(t) ⊕ I` on `[0, 1]` and their pointwise commutator loop.
#[derive(Debug, Clone)]
pub struct GeneratorLoops {
    pub rk: SampledPath,
    pub ri: SampledPath,
    pub commutator: SOLoop,
}

pub fn generator_loops(n: usize, grid: usize) -> Result<GeneratorLoops> {
    if n < 3 {
        return Err(SpinError::DimensionTooSmall(n));
    }
    let stage = |name: &str| vec![Stage { start: 0.0, end: 1.0, label: StageLabel::Custom(name.into()) }];
    let rk = SampledPath::from_path(
        Arc::new(FnPath::new(n, (0.0, 1.0), move |t| embed_top_left(&rotation_k(t), n))),
        grid,
        stage("R_k"),
    );
    let ri = SampledPath::from_path(
        Arc::new(FnPath::new(n, (0.0, 1.0), move |t| embed_top_left(&rotation_i(t), n))),
        grid,
        stage("R_i"),
    );
    let commutator = SOLoop::from_fn(grid, |t| {
        let a = embed_top_left(&rotation_k(t), n);
        let c = embed_top_left(&rotation_i(t), n);
        group_commutator(&a, &c).expect("rotations are invertible")
    })?;
    Ok(GeneratorLoops { rk, ri, commutator })
}

/// `(ν, sign)`: the negative parity of the pair and the lift sign of the
/// commutator loop `[R_k ⊕ I, R_i ⊕ I]^ν` (constant for `ν = 0`).
pub fn spin_obstruction_of_pair(pair: &CommutingPair) -> Result<(u8, i8)> {
    let n = pair.n();
    if n < 3 {
        return Err(SpinError::DimensionTooSmall(n));
    }
    let nu = negative_parity(pair)?;
    let loop_ = if nu == 1 {
        generator_loops(n, DEFAULT_LOOP_GRID)?.commutator
    } else {
        SOLoop::constant(n, DEFAULT_LOOP_GRID)?
    };
    Ok((nu, lift_loop(&loop_)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg_paths::{canonical_ri, canonical_rk};

    #[test]
    fn log_of_small_rotation() {
        let omega = so_log_small(&rotation_k(0.05)).unwrap();
        let x = 0.05 * std::f64::consts::PI;
        assert!((omega[(0, 1)] + x).abs() < 1e-14);
        assert!((omega[(1, 0)] - x).abs() < 1e-14);
        assert!(omega[(2, 2)].abs() < 1e-15);
        assert_eq!(so_log_small(&SquareMatrix::identity(4, 4)).unwrap(), SquareMatrix::zeros(4, 4));
        assert!(matches!(so_log_small(&rotation_k(0.5)), Err(SpinError::StepTooLarge(_))));
    }

    #[test]
    fn generator_endpoints() {
        let g = generator_loops(3, 64).unwrap();
        assert_eq!(g.rk.start(), &SquareMatrix::identity(3, 3));
        assert_eq!(g.rk.end(), &canonical_rk(3));
        assert_eq!(g.ri.end(), &canonical_ri(3));
        assert_eq!(g.commutator.samples()[64].1, SquareMatrix::identity(3, 3));
        let g5 = generator_loops(5, 64).unwrap();
        for (_, m) in g5.commutator.samples() {
            assert_eq!(m.view((3, 3), (2, 2)).into_owned(), SquareMatrix::identity(2, 2));
        }
    }

    #[test]
    fn commutator_loop_is_nontrivial() {
        let g = generator_loops(3, 2048).unwrap();
        let out = lift_loop_detailed(&g.commutator).unwrap();
        assert_eq!(out.sign, -1);
        assert!(out.closure_residual < 1e-8);
    }

    #[test]
    fn full_turn_and_double_turn() {
        let turn = SOLoop::from_fn(512, |t| rotation_k(2.0 * t)).unwrap();
        assert_eq!(lift_loop(&turn).unwrap(), -1);
        assert_eq!(lift_loop(&turn.concat(&turn).unwrap()).unwrap(), 1);
        assert_eq!(lift_loop(&turn.concat(&turn.reverse()).unwrap()).unwrap(), 1);
        assert_eq!(lift_loop(&SOLoop::constant(3, 16).unwrap()).unwrap(), 1);
    }

    #[test]
    fn obstruction_examples() {
        let id = CommutingPair::new(SquareMatrix::identity(3, 3), SquareMatrix::identity(3, 3), 0.0).unwrap();
        assert_eq!(spin_obstruction_of_pair(&id).unwrap(), (0, 1));
        let canon = CommutingPair::new(canonical_rk(4), canonical_ri(4), 0.0).unwrap();
        assert_eq!(spin_obstruction_of_pair(&canon).unwrap(), (1, -1));
        let mut m = -SquareMatrix::identity(5, 5);
        m[(4, 4)] = 1.0;
        let pair = CommutingPair::new(m.clone(), m, 0.0).unwrap();
        assert_eq!(spin_obstruction_of_pair(&pair).unwrap(), (0, 1));
    }

    #[test]
    fn non_loop_is_rejected() {
        let samples = (0..=64).map(|m| (m as f64 / 64.0, rotation_k(m as f64 / 64.0))).collect();
        assert!(matches!(SOLoop::new(samples), Err(SpinError::InvalidLoop(_))));
    }
}
