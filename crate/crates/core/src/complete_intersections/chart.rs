//! Implicit-function charts of the zero set at `[0:⋯:0:1]^{ν+1}`.
//!
//! Chart coordinates are the affine coordinates `z_{f,i}/z_{f,n_f}` for
//! `i < n_f`. Of these, `m` are dependent (solved for by Newton's method) and
//! the remaining `n − m` are free; `z_{0,0}` is always free.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::numeric::NumericSystem;
use super::point::{involution_a, involution_c, ProjectivePoint};
use super::poly::{factor_offsets, PolySystem};
use super::{PolyError, Result};
use crate::SquareMatrix;

/// Free coordinates must have Euclidean norm below this radius.
pub const DEFAULT_CHART_RADIUS: f64 = 0.3;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const MAX_BLOCK_CONDITION: f64 = 1e8;
const BASE_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-6;

type C64 = Complex<f64>;

#[derive(Debug, Clone)]
pub struct Chart {
    num: NumericSystem,
    factor_dims: Vec<usize>,
    /// Flat homogeneous index of each chart coordinate.
    chart_vars: Vec<usize>,
    free: Vec<usize>,
    dependent: Vec<usize>,
    block_condition: f64,
    radius: f64,
}

fn condition_number(b: &DMatrix<C64>) -> f64 {
    let s = b.singular_values();
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 { max / min } else { f64::INFINITY }
}

impl Chart {
    /// Chart with dependent coordinates chosen by greedy largest-pivot
    /// elimination of the base-point Jacobian, never choosing `z_{0,0}`.
    pub fn new(sys: &PolySystem) -> Result<Self> {
        let (num, chart_vars, jc) = Self::base_jacobian(sys)?;
        let (m, n) = jc.shape();
        let mut work = jc.clone();
        let mut rows_left: Vec<usize> = (0..m).collect();
        let mut dependent = Vec::with_capacity(m);
        for _ in 0..m {
            let mut best = (0.0, 0, 0);
            for &r in &rows_left {
                for c in 1..n {
                    if dependent.contains(&c) {
                        continue;
                    }
                    let v = work[(r, c)].norm();
                    if v > best.0 {
                        best = (v, r, c);
                    }
                }
            }
            let (v, r, c) = best;
            if v == 0.0 {
                return Err(PolyError::SingularChartBlock(f64::INFINITY));
            }
            let pivot_row = work.row(r).clone_owned();
            for &r2 in &rows_left {
                if r2 != r {
                    let factor = work[(r2, c)] / work[(r, c)];
                    let updated = work.row(r2) - &pivot_row * factor;
                    work.row_mut(r2).copy_from(&updated);
                }
            }
            rows_left.retain(|&x| x != r);
            dependent.push(c);
        }
        dependent.sort_unstable();
        Self::finish(sys, num, chart_vars, &jc, dependent)
    }

    /// Chart with explicitly chosen dependent chart coordinates (`0` excluded).
    pub fn with_dependent(sys: &PolySystem, mut dependent: Vec<usize>) -> Result<Self> {
        let (num, chart_vars, jc) = Self::base_jacobian(sys)?;
        dependent.sort_unstable();
        dependent.dedup();
        if dependent.len() != sys.m() || dependent.contains(&0) || dependent.iter().any(|&c| c >= sys.n()) {
            return Err(PolyError::BadShape(format!(
                "dependent coordinates {dependent:?}: need {} distinct indices in 1..{}",
                sys.m(),
                sys.n()
            )));
        }
        Self::finish(sys, num, chart_vars, &jc, dependent)
    }

    fn base_jacobian(sys: &PolySystem) -> Result<(NumericSystem, Vec<usize>, DMatrix<C64>)> {
        let num = NumericSystem::new(sys);
        let base = ProjectivePoint::last_basis(sys.factor_dims());
        let (values, jac) = num.eval_with_jacobian(&base.flat());
        let res = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if res > BASE_TOL {
            return Err(PolyError::BasePointNotOnVariety(res));
        }
        let chart_vars: Vec<usize> = factor_offsets(sys.factor_dims())
            .iter()
            .zip(sys.factor_dims())
            .flat_map(|(&o, &d)| o..o + d)
            .collect();
        let jc = DMatrix::from_fn(sys.m(), chart_vars.len(), |r, c| jac[(r, chart_vars[c])]);
        Ok((num, chart_vars, jc))
    }

    fn finish(sys: &PolySystem, num: NumericSystem, chart_vars: Vec<usize>, jc: &DMatrix<C64>, dependent: Vec<usize>) -> Result<Self> {
        let block = DMatrix::from_fn(sys.m(), sys.m(), |r, c| jc[(r, dependent[c])]);
        let block_condition = condition_number(&block);
        if !(block_condition < MAX_BLOCK_CONDITION) {
            return Err(PolyError::SingularChartBlock(block_condition));
        }
        let free = (0..sys.n()).filter(|c| !dependent.contains(c)).collect();
        Ok(Self {
            num,
            factor_dims: sys.factor_dims().to_vec(),
            chart_vars,
            free,
            dependent,
            block_condition,
            radius: DEFAULT_CHART_RADIUS,
        })
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn dependent(&self) -> &[usize] {
        &self.dependent
    }

    pub fn block_condition(&self) -> f64 {
        self.block_condition
    }

    /// Name of chart coordinate `k`, e.g. `z2` or `z1_0`.
    pub fn coordinate_name(&self, k: usize) -> String {
        let var = self.chart_vars[k];
        let offsets = factor_offsets(&self.factor_dims);
        let f = offsets.iter().rposition(|&o| o <= var).expect("offset 0 exists");
        if self.factor_dims.len() == 1 { format!("z{}", var) } else { format!("z{f}_{}", var - offsets[f]) }
    }

    /// Homogeneous coordinates (last coordinate 1 per factor) of chart values `x`.
    pub fn homogeneous(&self, x: &[C64]) -> Vec<C64> {
        let mut z = vec![Complex::new(0.0, 0.0); self.num.nvars()];
        for (&o, &d) in factor_offsets(&self.factor_dims).iter().zip(&self.factor_dims) {
            z[o + d] = Complex::new(1.0, 0.0);
        }
        for (k, &v) in self.chart_vars.iter().enumerate() {
            z[v] = x[k];
        }
        z
    }

    /// Chart coordinates of a point, or `None` if some last coordinate vanishes.
    pub fn coordinates_of(&self, p: &ProjectivePoint) -> Option<Vec<C64>> {
        let mut out = Vec::with_capacity(self.chart_vars.len());
        for f in p.factors() {
            let last = *f.last().expect("nonempty factor");
            if last.norm() < 1e-300 {
                return None;
            }
            out.extend(f[..f.len() - 1].iter().map(|z| z / last));
        }
        Some(out)
    }

    /// All `n` chart coordinates of the zero-set point with the given free values.
    pub fn full_coordinates(&self, free: &[C64]) -> Result<Vec<C64>> {
        let dep = self.solve(free)?;
        let mut x = vec![Complex::new(0.0, 0.0); self.chart_vars.len()];
        for (k, &c) in self.free.iter().enumerate() {
            x[c] = free[k];
        }
        for (k, &c) in self.dependent.iter().enumerate() {
            x[c] = dep[k];
        }
        Ok(x)
    }

    /// Newton solve for the dependent coordinates, starting from 0.
    pub fn solve(&self, free: &[C64]) -> Result<DVector<C64>> {
        if free.len() != self.free.len() {
            return Err(PolyError::BadShape(format!("{} free values, chart has {}", free.len(), self.free.len())));
        }
        let norm = free.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm < self.radius) {
            return Err(PolyError::FreeOutsideChart { norm, radius: self.radius });
        }
        let m = self.dependent.len();
        let mut x = vec![Complex::new(0.0, 0.0); self.chart_vars.len()];
        for (k, &c) in self.free.iter().enumerate() {
            x[c] = free[k];
        }
        let mut res = f64::INFINITY;
        for _ in 0..=NEWTON_MAX_ITER {
            let (f, jac) = self.num.eval_with_jacobian(&self.homogeneous(&x));
            res = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if !res.is_finite() {
                break;
            }
            if res < NEWTON_TOL {
                return Ok(DVector::from_iterator(m, self.dependent.iter().map(|&c| x[c])));
            }
            let block = DMatrix::from_fn(m, m, |r, c| jac[(r, self.chart_vars[self.dependent[c]])]);
            let Some(step) = block.lu().solve(&(-f)) else { break };
            for (k, &c) in self.dependent.iter().enumerate() {
                x[c] += step[k];
            }
        }
        Err(PolyError::NewtonDivergence(res))
    }
}

/// Dependent chart coordinates at the given free values, using [`Chart::new`].
pub fn chart_newton(sys: &PolySystem, free: &[C64]) -> Result<Vec<C64>> {
    Ok(Chart::new(sys)?.solve(free)?.iter().copied().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalActionReport {
    /// max |φ⁻¹(a(φ(w))) − φ⁻¹(φ(−w₀, w₁, …))| over all chart coordinates.
    pub res_a: f64,
    /// max |φ⁻¹(c(φ(w))) − φ⁻¹(φ(conj w))| over all chart coordinates.
    pub res_c: f64,
    pub samples: usize,
    pub radius: f64,
}

fn random_ball(dim: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let r = radius * rng.random::<f64>().powf(1.0 / (2 * dim) as f64);
    v.into_iter().map(|z| z * (r / norm)).collect()
}

/// Samples free coordinates `w` with `|w| ≤ radius` (the first one is `w = 0`)
/// and measures how far `a` and `c` are from `w₀ ↦ −w₀` and `w ↦ conj(w)` in the chart.
pub fn local_action_check(sys: &PolySystem, num_samples: usize, radius: f64, seed: u64) -> Result<LocalActionReport> {
    let chart = Chart::new(sys)?;
    let chart = if radius >= chart.radius() { chart.with_radius(radius * (1.0 + 1e-9)) } else { chart };
    let k = chart.free().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res_a: f64 = 0.0;
    let mut res_c: f64 = 0.0;
    for s in 0..num_samples {
        let w = if s == 0 { vec![Complex::new(0.0, 0.0); k] } else { random_ball(k, radius, &mut rng) };
        let x = chart.full_coordinates(&w)?;
        let p = ProjectivePoint::from_flat(&chart.factor_dims, &chart.homogeneous(&x))?;
        let coords = |q: &ProjectivePoint| chart.coordinates_of(q).ok_or(PolyError::NewtonDivergence(f64::INFINITY));
        let xa = coords(&involution_a(&p))?;
        let xc = coords(&involution_c(&p))?;
        let mut wa = w.clone();
        wa[0] = -wa[0];
        let wc: Vec<C64> = w.iter().map(|z| z.conj()).collect();
        let ta = chart.full_coordinates(&wa)?;
        let tc = chart.full_coordinates(&wc)?;
        let diff = |u: &[C64], v: &[C64]| u.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        res_a = res_a.max(diff(&xa, &ta));
        res_c = res_c.max(diff(&xc, &tc));
    }
    Ok(LocalActionReport { res_a, res_c, samples: num_samples, radius })
}

/// Real differentials of `a` and `c` at the fixed point in the coordinates
/// `(Re w₀, Im w₀, Re w₁, Im w₁, …)` of the free chart coordinates.
#[derive(Debug, Clone)]
pub struct Differentials {
    pub da: SquareMatrix,
    pub dc: SquareMatrix,
    pub det_da: f64,
    pub det_dc: f64,
    /// Finite-difference cross-check residuals.
    pub fd_residual_a: f64,
    pub fd_residual_c: f64,
    pub free_coordinates: Vec<String>,
}

impl Differentials {
    pub fn fd_residual(&self) -> f64 {
        self.fd_residual_a.max(self.fd_residual_c)
    }

    pub fn c_preserves_orientation(&self) -> bool {
        self.det_dc > 0.0
    }
}

fn fd_differential(chart: &Chart, map: impl Fn(&ProjectivePoint) -> ProjectivePoint) -> Result<SquareMatrix> {
    let k = chart.free().len();
    let eval = |x: &[f64]| -> Result<Vec<f64>> {
        let w: Vec<C64> = (0..k).map(|j| Complex::new(x[2 * j], x[2 * j + 1])).collect();
        let full = chart.full_coordinates(&w)?;
        let p = ProjectivePoint::from_flat(&chart.factor_dims, &chart.homogeneous(&full))?;
        let y = chart.coordinates_of(&map(&p)).ok_or(PolyError::NewtonDivergence(f64::INFINITY))?;
        Ok(chart.free().iter().flat_map(|&c| [y[c].re, y[c].im]).collect())
    };
    let mut out = SquareMatrix::zeros(2 * k, 2 * k);
    for q in 0..2 * k {
        let mut xp = vec![0.0; 2 * k];
        let mut xm = vec![0.0; 2 * k];
        xp[q] = FD_STEP;
        xm[q] = -FD_STEP;
        let (fp, fm) = (eval(&xp)?, eval(&xm)?);
        for r in 0..2 * k {
            out[(r, q)] = (fp[r] - fm[r]) / (2.0 * FD_STEP);
        }
    }
    Ok(out)
}

pub fn differentials_at_fixed_point(sys: &PolySystem) -> Result<Differentials> {
    let chart = Chart::new(sys)?;
    let k = chart.free().len();
    let mut da = SquareMatrix::identity(2 * k, 2 * k);
    da[(0, 0)] = -1.0;
    da[(1, 1)] = -1.0;
    let dc = SquareMatrix::from_diagonal(&crate::Vector::from_fn(2 * k, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 }));
    let fd_a = fd_differential(&chart, involution_a)?;
    let fd_c = fd_differential(&chart, involution_c)?;
    let fd_residual_a = (&fd_a - &da).abs().max();
    let fd_residual_c = (&fd_c - &dc).abs().max();
    if !(fd_residual_a.max(fd_residual_c) <= FD_TOL) {
        return Err(PolyError::DifferentialMismatch(fd_residual_a.max(fd_residual_c)));
    }
    Ok(Differentials {
        det_da: da.determinant(),
        det_dc: dc.determinant(),
        free_coordinates: chart.free().iter().map(|&c| chart.coordinate_name(c)).collect(),
        da,
        dc,
        fd_residual_a,
        fd_residual_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete_intersections::parse_system;

    fn k3() -> PolySystem {
        parse_system("z0^4 + z1^4 + z2^4 + z2*z3^3", &[3]).unwrap()
    }

    fn c(re: f64) -> C64 {
        Complex::new(re, 0.0)
    }

    #[test]
    fn k3_chart_values() {
        let sys = k3();
        let chart = Chart::new(&sys).unwrap();
        assert_eq!(chart.dependent(), &[2]);
        assert_eq!(chart.free(), &[0, 1]);
        assert_eq!(chart_newton(&sys, &[c(0.0), c(0.0)]).unwrap()[0].norm(), 0.0);
        let p = chart_newton(&sys, &[c(0.1), c(0.0)]).unwrap()[0];
        let q = chart_newton(&sys, &[c(0.0), c(0.1)]).unwrap()[0];
        assert!((p.re + 1.0e-4).abs() < 1e-9 && p.im.abs() < 1e-15);
        assert!((p - q).norm() < 1e-15);
        assert!(matches!(chart_newton(&sys, &[c(0.5), c(0.0)]), Err(PolyError::FreeOutsideChart { .. })));
    }

    #[test]
    fn chart_errors() {
        let off = parse_system("z0^2 + z3^2", &[3]).unwrap();
        assert!(matches!(Chart::new(&off), Err(PolyError::BasePointNotOnVariety(_))));
        let sing = parse_system("z0^2 + z1^2", &[3]).unwrap();
        assert!(matches!(Chart::new(&sing), Err(PolyError::SingularChartBlock(_))));
        assert!(Chart::with_dependent(&k3(), vec![0]).is_err());
        assert!(matches!(Chart::with_dependent(&k3(), vec![1]), Err(PolyError::SingularChartBlock(_))));
    }

    #[test]
    fn local_action_residuals() {
        let r = local_action_check(&k3(), 50, 0.1, 5).unwrap();
        assert!(r.res_a <= 1e-8 && r.res_c <= 1e-8, "{r:?}");
        let r0 = local_action_check(&k3(), 1, 0.1, 5).unwrap();
        assert_eq!((r0.res_a, r0.res_c), (0.0, 0.0));
        let lin = parse_system("z1", &[3]).unwrap();
        let r = local_action_check(&lin, 50, 0.2, 5).unwrap();
        assert!(r.res_a <= 1e-12 && r.res_c <= 1e-12);
    }

    #[test]
    fn k3_differentials() {
        let d = differentials_at_fixed_point(&k3()).unwrap();
        assert_eq!(d.da, SquareMatrix::from_diagonal(&crate::Vector::from_vec(vec![-1.0, -1.0, 1.0, 1.0])));
        assert_eq!(d.dc, SquareMatrix::from_diagonal(&crate::Vector::from_vec(vec![1.0, -1.0, 1.0, -1.0])));
        assert!(d.fd_residual() <= 1e-6);
        assert_eq!(d.free_coordinates, vec!["z0", "z1"]);
        assert!(d.c_preserves_orientation());
        let odd = parse_system("z0^2 + z1^2 + z2^2 + z3^2 + z3*z4", &[4]).unwrap();
        assert!(!differentials_at_fixed_point(&odd).unwrap().c_preserves_orientation());
    }
}
