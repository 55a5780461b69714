use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::matrix::max_abs;
use super::{LinalgError, Result};
use crate::SquareMatrix;

/// A smooth matrix-valued path on a parameter interval.
pub trait MatrixPath: Send + Sync {
    fn dim(&self) -> usize;

    /// Parameter interval `[t0, t1]`.
    fn domain(&self) -> (f64, f64);

    fn value(&self, t: f64) -> SquareMatrix;

    /// Time derivative; the default uses central differences, one-sided near
    /// the ends of the domain.
    fn derivative(&self, t: f64) -> SquareMatrix {
        let (t0, t1) = self.domain();
        let h = 1e-6 * (t1 - t0).max(1e-300);
        if t - h < t0 {
            (self.value(t + h) - self.value(t)) / h
        } else if t + h > t1 {
            (self.value(t) - self.value(t - h)) / h
        } else {
            (self.value(t + h) - self.value(t - h)) / (2.0 * h)
        }
    }
}

/// Which part of a synthesized path a parameter interval belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageLabel {
    /// Removal of the nilpotent parts.
    S,
    /// Rescaling of the spectra onto the unit circle.
    N,
    /// Conjugation from the eigenbasis to the standard basis.
    O,
    /// Rotation of the SO(2) slots to the identity.
    R,
    Custom(String),
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageLabel::S => f.write_str("S"),
            StageLabel::N => f.write_str("N"),
            StageLabel::O => f.write_str("O"),
            StageLabel::R => f.write_str("R"),
            StageLabel::Custom(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub start: f64,
    pub end: f64,
    pub label: StageLabel,
}

/// A path stored as a closed-form evaluator together with a uniform sample
/// grid and a Lipschitz certificate for the samples.
#[derive(Clone)]
pub struct SampledPath {
    t0: f64,
    t1: f64,
    samples: Vec<(f64, SquareMatrix)>,
    stages: Vec<Stage>,
    lipschitz: f64,
    closed_form: Option<Arc<dyn MatrixPath>>,
}

impl fmt::Debug for SampledPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledPath")
            .field("t0", &self.t0)
            .field("t1", &self.t1)
            .field("samples", &self.samples.len())
            .field("stages", &self.stages)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

/// Largest ratio `‖Δvalue‖_max / Δt` over consecutive samples.
fn observed_lipschitz(samples: &[(f64, SquareMatrix)]) -> f64 {
    samples
        .windows(2)
        .map(|w| max_abs(&(&w[1].1 - &w[0].1)) / (w[1].0 - w[0].0))
        .fold(0.0, f64::max)
}

impl SampledPath {
    /// Samples `path` on `segments + 1` uniform times.
    pub fn from_path(path: Arc<dyn MatrixPath>, segments: usize, stages: Vec<Stage>) -> Self {
        let (t0, t1) = path.domain();
        let segments = segments.max(1);
        let samples: Vec<(f64, SquareMatrix)> = (0..=segments)
            .map(|m| {
                let t = if m == segments {
                    t1
                } else {
                    t0 + (t1 - t0) * m as f64 / segments as f64
                };
                (t, path.value(t))
            })
            .collect();
        // The certificate is measured on a twice finer grid, so it also covers
        // the behaviour between the stored samples.
        let fine: Vec<(f64, SquareMatrix)> = (0..=2 * segments)
            .map(|m| {
                let t = t0 + (t1 - t0) * m as f64 / (2 * segments) as f64;
                (t, path.value(t.min(t1)))
            })
            .collect();
        let lipschitz = observed_lipschitz(&fine).max(observed_lipschitz(&samples)) * (1.0 + 1e-9);
        Self { t0, t1, samples, stages, lipschitz, closed_form: Some(path) }
    }

    /// Builds a path from explicit samples; values between samples are
    /// interpolated linearly.
    pub fn from_samples(samples: Vec<(f64, SquareMatrix)>, stages: Vec<Stage>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(LinalgError::GridTooCoarse { min: 2, got: samples.len() });
        }
        let n = samples[0].1.nrows();
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(LinalgError::Eigenstructure(
                    "sample times must be strictly increasing".into(),
                ));
            }
        }
        for (_, m) in &samples {
            if m.nrows() != n || m.ncols() != n {
                return Err(LinalgError::DimensionMismatch(n, m.nrows()));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(LinalgError::NonFinite);
            }
        }
        let lipschitz = observed_lipschitz(&samples) * (1.0 + 1e-9);
        let t0 = samples[0].0;
        let t1 = samples[samples.len() - 1].0;
        Ok(Self { t0, t1, samples, stages, lipschitz, closed_form: None })
    }

    /// Constant path.
    pub fn constant(m: SquareMatrix, segments: usize, label: StageLabel) -> Self {
        let path = Arc::new(ConstantPath(m));
        Self::from_path(path, segments, vec![Stage { start: 0.0, end: 1.0, label }])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn samples(&self) -> &[(f64, SquareMatrix)] {
        &self.samples
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn start(&self) -> &SquareMatrix {
        &self.samples[0].1
    }

    pub fn end(&self) -> &SquareMatrix {
        &self.samples[self.samples.len() - 1].1
    }

    /// Checks the continuity certificate on the stored samples.
    pub fn certificate_holds(&self) -> bool {
        self.samples.windows(2).all(|w| {
            max_abs(&(&w[1].1 - &w[0].1)) <= self.lipschitz * (w[1].0 - w[0].0) + 1e-15
        })
    }

    /// Pointwise map `t ↦ f(value(t))` on the same samples.
    pub fn map_samples(&self, f: impl Fn(&SquareMatrix) -> SquareMatrix) -> Result<Self> {
        let samples = self.samples.iter().map(|(t, m)| (*t, f(m))).collect();
        Self::from_samples(samples, self.stages.clone())
    }

    fn interpolate(&self, t: f64) -> SquareMatrix {
        let t = t.clamp(self.t0, self.t1);
        let idx = self.samples.partition_point(|(s, _)| *s <= t);
        if idx == 0 {
            return self.samples[0].1.clone();
        }
        if idx >= self.samples.len() {
            return self.end().clone();
        }
        let (ta, ma) = &self.samples[idx - 1];
        let (tb, mb) = &self.samples[idx];
        let w = (t - ta) / (tb - ta);
        ma * (1.0 - w) + mb * w
    }
}

impl MatrixPath for SampledPath {
    fn dim(&self) -> usize {
        self.samples[0].1.nrows()
    }

    fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    fn value(&self, t: f64) -> SquareMatrix {
        match &self.closed_form {
            Some(p) => p.value(t.clamp(self.t0, self.t1)),
            None => self.interpolate(t),
        }
    }

    fn derivative(&self, t: f64) -> SquareMatrix {
        match &self.closed_form {
            Some(p) => p.derivative(t.clamp(self.t0, self.t1)),
            None => {
                let idx = self.samples.partition_point(|(s, _)| *s <= t).clamp(1, self.samples.len() - 1);
                let (ta, ma) = &self.samples[idx - 1];
                let (tb, mb) = &self.samples[idx];
                (mb - ma) / (tb - ta)
            }
        }
    }
}

#[derive(Debug, Clone)]
struct ConstantPath(SquareMatrix);

impl MatrixPath for ConstantPath {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn value(&self, _t: f64) -> SquareMatrix {
        self.0.clone()
    }

    fn derivative(&self, _t: f64) -> SquareMatrix {
        SquareMatrix::zeros(self.0.nrows(), self.0.ncols())
    }
}

/// Path given by a closure on `[t0, t1]`.
pub struct FnPath<F> {
    n: usize,
    domain: (f64, f64),
    f: F,
}

impl<F: Fn(f64) -> SquareMatrix + Send + Sync> FnPath<F> {
    pub fn new(n: usize, domain: (f64, f64), f: F) -> Self {
        Self { n, domain, f }
    }
}

impl<F: Fn(f64) -> SquareMatrix + Send + Sync> MatrixPath for FnPath<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn value(&self, t: f64) -> SquareMatrix {
        (self.f)(t)
    }
}

/// Max over samples of `‖α γ α⁻¹ γ⁻¹ − I‖_max`.
///
/// Inverses come from LU factorizations, independent of how the paths were
/// produced. A singular sample yields `+∞`.
pub fn path_commutator_residual(alpha: &SampledPath, gamma: &SampledPath) -> Result<f64> {
    let (sa, sg) = (alpha.samples(), gamma.samples());
    if sa.len() != sg.len() || sa.iter().zip(sg).any(|(x, y)| (x.0 - y.0).abs() > 1e-15) {
        return Err(LinalgError::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for ((_, a), (_, c)) in sa.iter().zip(sg) {
        let n = a.nrows();
        let (Some(a_inv), Some(c_inv)) = (a.clone().lu().try_inverse(), c.clone().lu().try_inverse())
        else {
            return Ok(f64::INFINITY);
        };
        let comm = a * c * a_inv * c_inv - SquareMatrix::identity(n, n);
        worst = worst.max(max_abs(&comm));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::matrix::rotation_k;
    use super::*;

    #[test]
    fn constant_identity_residual_is_zero() {
        let id = SampledPath::constant(SquareMatrix::identity(3, 3), 32, StageLabel::S);
        assert_eq!(path_commutator_residual(&id, &id).unwrap(), 0.0);
    }

    #[test]
    fn path_commutes_with_itself() {
        let p = SampledPath::from_path(
            Arc::new(FnPath::new(3, (0.0, 1.0), rotation_k)),
            64,
            vec![],
        );
        assert!(path_commutator_residual(&p, &p).unwrap() < 1e-15);
        assert!(p.certificate_holds());
        assert!(p.lipschitz() >= std::f64::consts::PI * 0.99);
    }

    #[test]
    fn mismatched_grids_error() {
        let a = SampledPath::constant(SquareMatrix::identity(3, 3), 32, StageLabel::S);
        let b = SampledPath::constant(SquareMatrix::identity(3, 3), 16, StageLabel::S);
        assert_eq!(path_commutator_residual(&a, &b), Err(LinalgError::GridMismatch));
    }

    #[test]
    fn interpolation_between_samples() {
        let s = vec![
            (0.0, SquareMatrix::zeros(1, 1)),
            (1.0, SquareMatrix::from_element(1, 1, 2.0)),
        ];
        let p = SampledPath::from_samples(s, vec![]).unwrap();
        assert_eq!(p.value(0.25)[(0, 0)], 0.5);
        assert_eq!(p.derivative(0.25)[(0, 0)], 2.0);
    }
}
