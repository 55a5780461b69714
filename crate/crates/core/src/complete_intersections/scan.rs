//! Monte Carlo smoothness probing.
//!
//! Each sample draws a complex-Gaussian point (one independent ChaCha stream
//! per sample index), projects it onto the zero set by damped Gauss–Newton
//! with pseudo-inverse steps, and records the smallest singular value of the
//! Jacobian in the affine chart of its normalizing coordinates.

use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::numeric::{jacobian_minors, NumericSystem};
use super::point::ProjectivePoint;
use super::poly::{factor_offsets, PolySystem};
use super::{PolyError, Result};
use crate::parallel::{map_indexed_with_workers, Execution};

/// Samples with chart σ_min below this are reported as failures.
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 1e-6;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub num_samples: usize,
    pub seed: u64,
    pub sigma_threshold: f64,
    pub execution: Execution,
    /// Worker threads for [`Execution::Parallel`]; 0 uses the global pool.
    pub workers: usize,
    /// Measure σ_min in charts of a seeded random unitary frame (per factor)
    /// instead of the standard coordinates.
    pub frame_seed: Option<u64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            num_samples: 1000,
            seed: 0,
            sigma_threshold: DEFAULT_SIGMA_THRESHOLD,
            execution: Execution::default(),
            workers: 0,
            frame_seed: None,
        }
    }
}

/// A converged sample whose chart Jacobian is (numerically) rank deficient.
#[derive(Debug, Clone, Serialize)]
pub struct ScanFailure {
    pub sample_index: usize,
    pub point: ProjectivePoint,
    pub residual: f64,
    pub sigma_min: f64,
}

/// Exact-coordinate probe of a special point.
#[derive(Debug, Clone, Serialize)]
pub struct SpecialPointResult {
    pub on_zero_set: bool,
    pub singular: bool,
    pub max_value: f64,
    pub max_minor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothnessReport {
    pub samples_requested: usize,
    pub samples_tested: usize,
    pub samples_discarded: usize,
    pub seed: u64,
    pub sigma_threshold: f64,
    pub min_singular_value: f64,
    pub max_residual: f64,
    pub failures: Vec<ScanFailure>,
    /// Keyed by the point, e.g. `[0:0:0:1]` or `[1:0]x[0:1]`.
    pub special_point_results: BTreeMap<String, SpecialPointResult>,
    /// Some polynomial has a nonzero coefficient on `∏_f z_{f,0}^{d_f}`,
    /// equivalently `[1:0:⋯:0]^{ν+1}` is off the zero set.
    pub pure_first_coordinate_term: bool,
}

impl SmoothnessReport {
    /// A failing sample or a singular special point was found.
    pub fn singular_detected(&self) -> bool {
        !self.failures.is_empty() || self.special_point_results.values().any(|r| r.singular)
    }
}

#[derive(Debug, Clone)]
struct Sample {
    point: ProjectivePoint,
    residual: f64,
    sigma_min: f64,
}

fn max_norm(v: &DVector<Complex<f64>>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn normalized(dims: &[usize], z: &[Complex<f64>]) -> Option<Vec<Complex<f64>>> {
    ProjectivePoint::from_flat(dims, z).ok().map(|p| p.flat())
}

/// Damped Gauss–Newton onto the zero set. `None` when it fails to converge.
fn project(num: &NumericSystem, dims: &[usize], start: Vec<Complex<f64>>) -> Option<(Vec<Complex<f64>>, f64)> {
    let mut z = normalized(dims, &start)?;
    let mut r = max_norm(&num.eval(&z));
    for _ in 0..NEWTON_MAX_ITER {
        if r < NEWTON_TOL {
            return Some((z, r));
        }
        let (f, j) = num.eval_with_jacobian(&z);
        let jh = j.adjoint();
        let y = (&j * &jh).lu().solve(&f)?;
        let delta = -(jh * y);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<Complex<f64>> = z.iter().zip(delta.iter()).map(|(a, d)| a + d * step).collect();
            if let Some(c) = normalized(dims, &cand) {
                let rc = max_norm(&num.eval(&c));
                if rc.is_finite() && rc <= r {
                    accepted = Some((c, rc));
                    break;
                }
            }
            step *= 0.5;
        }
        let (c, rc) = accepted?;
        z = c;
        r = rc;
    }
    (r < NEWTON_TOL).then_some((z, r))
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-like random unitary from the QR factorization of a Gaussian matrix.
fn random_unitary(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex<f64>> {
    let g = DMatrix::from_fn(k, k, |_, _| complex_gaussian(rng));
    g.qr().q()
}

/// Smallest singular value of the chart Jacobian at `z` (on the zero set).
fn chart_sigma(num: &NumericSystem, dims: &[usize], z: &[Complex<f64>], frame: Option<&[DMatrix<Complex<f64>>]>) -> f64 {
    let offsets = factor_offsets(dims);
    // Representative of the point, normalized in the measuring frame.
    let mut rep = z.to_vec();
    let mut w_all = z.to_vec();
    if let Some(us) = frame {
        for ((&o, &d), u) in offsets.iter().zip(dims).zip(us) {
            let zf = DVector::from_column_slice(&z[o..=o + d]);
            let w = u.adjoint() * zf;
            w_all[o..=o + d].copy_from_slice(w.as_slice());
        }
        w_all = normalized(dims, &w_all).expect("nonzero factors");
        for ((&o, &d), u) in offsets.iter().zip(dims).zip(us) {
            let w = DVector::from_column_slice(&w_all[o..=o + d]);
            rep[o..=o + d].copy_from_slice((u * w).as_slice());
        }
    }
    let (_, mut jac) = num.eval_with_jacobian(&rep);
    if let Some(us) = frame {
        for ((&o, &d), u) in offsets.iter().zip(dims).zip(us) {
            let block = jac.columns(o, d + 1) * u;
            jac.columns_mut(o, d + 1).copy_from(&block);
        }
    }
    let mut keep = Vec::new();
    for (&o, &d) in offsets.iter().zip(dims) {
        let coords = &w_all[o..=o + d];
        let pivot = coords.iter().position(|c| *c == Complex::new(1.0, 0.0)).unwrap_or(d);
        keep.extend((0..=d).filter(|&i| i != pivot).map(|i| o + i));
    }
    let chart = DMatrix::from_fn(jac.nrows(), keep.len(), |r, c| jac[(r, keep[c])]);
    chart.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn smoothness_scan(sys: &PolySystem, num_samples: usize, seed: u64, sigma_threshold: f64) -> Result<SmoothnessReport> {
    smoothness_scan_with(sys, &ScanOptions { num_samples, seed, sigma_threshold, ..ScanOptions::default() })
}

pub fn smoothness_scan_with(sys: &PolySystem, opts: &ScanOptions) -> Result<SmoothnessReport> {
    let num = NumericSystem::new(sys);
    let dims = sys.factor_dims().to_vec();
    let frame: Option<Vec<DMatrix<Complex<f64>>>> = opts.frame_seed.map(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        dims.iter().map(|&d| random_unitary(d + 1, &mut rng)).collect()
    });

    let samples: Vec<Option<Sample>> = map_indexed_with_workers(opts.num_samples, opts.execution, opts.workers, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(i as u64);
        let start: Vec<Complex<f64>> = (0..num.nvars()).map(|_| complex_gaussian(&mut rng)).collect();
        let (z, residual) = project(&num, &dims, start)?;
        let sigma_min = chart_sigma(&num, &dims, &z, frame.as_deref());
        let point = ProjectivePoint::from_flat(&dims, &z).ok()?;
        Some(Sample { point, residual, sigma_min })
    });

    let samples_tested = samples.iter().filter(|s| s.is_some()).count();
    if samples_tested == 0 {
        return Err(PolyError::NoConvergentSamples(opts.num_samples));
    }
    let mut min_singular_value = f64::INFINITY;
    let mut max_residual: f64 = 0.0;
    let mut failures = Vec::new();
    for (i, s) in samples.into_iter().enumerate() {
        let Some(s) = s else { continue };
        min_singular_value = min_singular_value.min(s.sigma_min);
        max_residual = max_residual.max(s.residual);
        if s.sigma_min < opts.sigma_threshold {
            failures.push(ScanFailure { sample_index: i, point: s.point, residual: s.residual, sigma_min: s.sigma_min });
        }
    }

    let mut special_point_results = BTreeMap::new();
    for mask in 0..(1usize << dims.len()) {
        let choice: Vec<usize> = dims.iter().enumerate().map(|(f, &d)| if mask >> f & 1 == 1 { d } else { 0 }).collect();
        let p = ProjectivePoint::basis(&dims, &choice)?;
        let r = jacobian_minors(sys, &p);
        special_point_results.insert(
            p.to_string(),
            SpecialPointResult { on_zero_set: r.on_zero_set, singular: r.singular, max_value: r.max_value, max_minor: r.max_minor },
        );
    }
    let offsets = sys.offsets();
    let pure_first_coordinate_term = sys.polys().iter().any(|p| {
        let mut e = vec![0; p.nvars()];
        for (&o, &d) in offsets.iter().zip(p.multidegree()) {
            e[o] = d;
        }
        p.poly().coefficient(&e) != num_rational::BigRational::from_integer(0.into())
    });

    Ok(SmoothnessReport {
        samples_requested: opts.num_samples,
        samples_tested,
        samples_discarded: opts.num_samples - samples_tested,
        seed: opts.seed,
        sigma_threshold: opts.sigma_threshold,
        min_singular_value,
        max_residual,
        failures,
        special_point_results,
        pure_first_coordinate_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete_intersections::parse_system;

    #[test]
    fn quadric_is_smooth() {
        let sys = parse_system("z0^2 + z1^2 + z2^2 + z2*z3", &[3]).unwrap();
        let r = smoothness_scan(&sys, 200, 7, DEFAULT_SIGMA_THRESHOLD).unwrap();
        assert!(r.samples_tested > 190);
        assert!(r.min_singular_value > 1e-3, "{}", r.min_singular_value);
        assert!(!r.singular_detected());
        assert!(r.pure_first_coordinate_term);
        assert!(!r.special_point_results["[1:0:0:0]"].on_zero_set);
        assert!(r.special_point_results["[0:0:0:1]"].on_zero_set);
    }

    #[test]
    fn reducible_quadric_is_flagged() {
        let sys = parse_system("z0*z1", &[3]).unwrap();
        let r = smoothness_scan(&sys, 100, 1, DEFAULT_SIGMA_THRESHOLD).unwrap();
        assert!(r.special_point_results["[0:0:0:1]"].singular);
        assert!(r.singular_detected());
    }

    #[test]
    fn scheduling_does_not_change_results() {
        let sys = parse_system("z0^4 + z1^4 + z2^4 + z2*z3^3", &[3]).unwrap();
        let seq = ScanOptions { num_samples: 64, seed: 3, execution: Execution::Sequential, ..Default::default() };
        let par = ScanOptions { execution: Execution::Parallel, workers: 3, ..seq.clone() };
        let a = smoothness_scan_with(&sys, &seq).unwrap();
        let b = smoothness_scan_with(&sys, &par).unwrap();
        assert_eq!(a.min_singular_value.to_bits(), b.min_singular_value.to_bits());
        assert_eq!(a.samples_tested, b.samples_tested);
    }
}
