use std::sync::Arc;

use nalgebra::Complex;

use super::eigen::{common_eigenstructure, default_cluster_tol, EigenStructure};
use super::matrix::{commutator_residual, cos_sin_pi, max_abs, orthogonal_log, polar_decomposition};
use super::pair::{canonical_pair, CommutingPair};
use super::path::{MatrixPath, SampledPath, Stage, StageLabel};
use super::{LinalgError, Result};
use crate::smooth::smooth_step;
use crate::SquareMatrix;

/// Samples per unit parameter used when the caller has no preference.
pub const DEFAULT_GRID: usize = 1024;
/// Coarsest accepted grid.
pub const MIN_GRID: usize = 16;

const STAGES: [StageLabel; 4] = [StageLabel::S, StageLabel::N, StageLabel::O, StageLabel::R];

/// Output of [`synth_commuting_path`].
#[derive(Debug, Clone)]
pub struct CommutingPaths {
    pub alpha: SampledPath,
    pub gamma: SampledPath,
    pub nu: u8,
    /// Change of basis into slot coordinates (columns are eigenvectors).
    pub basis: SquareMatrix,
    /// Max over samples of `‖αγ − γα‖_max`.
    pub max_commutator: f64,
    /// Min over samples of `min(det α, det γ)`.
    pub min_det: f64,
    /// Distance of the endpoints at `t = 1` from the canonical pair.
    pub endpoint_error: f64,
    pub structure: EigenStructure,
}

/// A 2×2 slot in slot coordinates rotated in stage R.
#[derive(Debug, Clone, Copy)]
struct RotSlot {
    start: usize,
    phase_a: f64,
    phase_c: f64,
}

/// Everything the four stages need, shared between `α` and `γ`.
#[derive(Debug)]
struct Layout {
    n: usize,
    b: SquareMatrix,
    b_inv: SquareMatrix,
    /// `log Q` and `P` from the polar decomposition `B = QP`, or `None` when
    /// `B = I` and stage O is constant.
    polar: Option<(SquareMatrix, SquareMatrix)>,
    slots: Vec<RotSlot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    A,
    C,
}

#[derive(Debug)]
struct Side {
    start: SquareMatrix,
    /// Semisimple part `B Ŝ B⁻¹`.
    semisimple: SquareMatrix,
    /// Spectrum on the unit circle in slot coordinates.
    unit: SquareMatrix,
    /// `|λ|` per slot coordinate.
    moduli: Vec<f64>,
}

struct FourStagePath {
    layout: Arc<Layout>,
    side: Side,
    which: Which,
}

fn rot(phase: f64) -> [[f64; 2]; 2] {
    let (c, s) = cos_sin_pi(phase);
    [[c, -s], [s, c]]
}

fn write_slot(m: &mut SquareMatrix, start: usize, block: [[f64; 2]; 2]) {
    for i in 0..2 {
        for j in 0..2 {
            m[(start + i, start + j)] = block[i][j];
        }
    }
}

/// Phase of `λ` in units of π, in `(−1, 1]`, for the slot block
/// `[[a, b], [−b, a]]`; labels within `tol` of the real axis snap to 0 or 1.
fn slot_phase(lambda: Complex<f64>, tol: f64) -> f64 {
    if lambda.im.abs() <= tol {
        return if lambda.re < 0.0 { 1.0 } else { 0.0 };
    }
    let phase = (-lambda.im).atan2(lambda.re) / std::f64::consts::PI;
    if phase <= -1.0 {
        phase + 2.0
    } else {
        phase
    }
}

/// Stage R target increment: shortest way to 0, with a half turn going the
/// positive way.
fn phase_increment(phase: f64) -> f64 {
    if phase == 1.0 {
        1.0
    } else {
        -phase
    }
}

impl Layout {
    fn conjugation(&self, s: f64) -> Option<(SquareMatrix, SquareMatrix)> {
        let (log_q, p) = self.polar.as_ref()?;
        let n = self.n;
        let id = SquareMatrix::identity(n, n);
        let spd = &id * (1.0 - s) + p * s;
        let spd_inv = spd.clone().lu().try_inverse().expect("convex combination of SPD matrices");
        let rot = (log_q * s).exp();
        let rot_inv = (log_q * (-s)).exp();
        Some((rot * spd, spd_inv * rot_inv))
    }
}

impl FourStagePath {
    fn canonical_slots(&self, u: f64) -> SquareMatrix {
        let mut m = self.side.unit.clone();
        for slot in &self.layout.slots {
            let phase = match self.which {
                Which::A => slot.phase_a,
                Which::C => slot.phase_c,
            };
            write_slot(&mut m, slot.start, rot(phase + u * phase_increment(phase)));
        }
        m
    }
}

impl MatrixPath for FourStagePath {
    fn dim(&self) -> usize {
        self.layout.n
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn value(&self, t: f64) -> SquareMatrix {
        let t = t.clamp(0.0, 1.0);
        let l = &self.layout;
        if t <= 0.25 {
            let s = smooth_step(4.0 * t);
            &self.side.start + (&self.side.semisimple - &self.side.start) * s
        } else if t <= 0.5 {
            let s = smooth_step(4.0 * t - 1.0);
            let mut d = self.side.unit.clone();
            for (j, m) in self.side.moduli.iter().enumerate() {
                let f = m.powf(1.0 - s);
                d.column_mut(j).scale_mut(f);
            }
            &l.b * d * &l.b_inv
        } else if t <= 0.75 {
            let s = smooth_step(4.0 * t - 2.0);
            match l.conjugation(1.0 - s) {
                Some((phi, phi_inv)) if s < 1.0 => phi * &self.side.unit * phi_inv,
                _ => self.side.unit.clone(),
            }
        } else {
            self.canonical_slots(smooth_step(4.0 * t - 3.0))
        }
    }
}

#[derive(Default)]
struct Columns {
    cols: Vec<nalgebra::DVector<f64>>,
    lambda_a: Vec<Complex<f64>>,
    lambda_c: Vec<Complex<f64>>,
}

impl Columns {
    fn push(&mut self, v: nalgebra::DVector<f64>, la: Complex<f64>, lc: Complex<f64>) {
        self.cols.push(v);
        self.lambda_a.push(la);
        self.lambda_c.push(lc);
    }
}

/// Builds the smooth commuting paths from `(A, C)` to the canonical pair.
pub fn synth_commuting_path(pair: &CommutingPair, grid: usize) -> Result<CommutingPaths> {
    synth_commuting_path_with_tol(pair, grid, default_cluster_tol(pair))
}

/// [`synth_commuting_path`] with an explicit eigenvalue clustering tolerance.
pub fn synth_commuting_path_with_tol(
    pair: &CommutingPair,
    grid: usize,
    cluster_tol: f64,
) -> Result<CommutingPaths> {
    let n = pair.n();
    if n < 3 {
        return Err(LinalgError::DimensionTooSmall(n));
    }
    if grid < MIN_GRID {
        return Err(LinalgError::GridTooCoarse { min: MIN_GRID, got: grid });
    }
    for (which, m) in [("a", pair.a()), ("c", pair.c())] {
        let det = m.determinant();
        if !(det > 0.0) {
            return Err(LinalgError::NotOrientationPreserving { which, det });
        }
    }
    let structure = common_eigenstructure(pair, cluster_tol)?;
    let nu = structure.negative_parity();
    let tol = cluster_tol;

    // Sort real-label columns by sign class; conjugate pairs give slots.
    let sign = |z: Complex<f64>| z.re < 0.0;
    let mut classes: [Vec<(nalgebra::DVector<f64>, Complex<f64>, Complex<f64>)>; 4] = Default::default();
    let mut complex_cols = Columns::default();
    for block in &structure.blocks {
        match &block.complex_basis {
            None => {
                let class = match (sign(block.lambda_a), sign(block.lambda_c)) {
                    (true, false) => 0,
                    (true, true) => 1,
                    (false, true) => 2,
                    (false, false) => 3,
                };
                for col in block.basis.column_iter() {
                    classes[class].push((col.into_owned(), block.lambda_a, block.lambda_c));
                }
            }
            Some(v) => {
                let root2 = std::f64::consts::SQRT_2;
                for col in v.column_iter() {
                    let x = col.map(|z| z.re * root2);
                    let y = col.map(|z| z.im * root2);
                    complex_cols.push(x, block.lambda_a, block.lambda_c);
                    complex_cols.push(y, block.lambda_a, block.lambda_c);
                }
            }
        }
    }
    let [mut neg_pos, mut neg_neg, mut pos_neg, pos_pos] = classes;
    let mut cols = Columns::default();
    let mut slots: Vec<RotSlot> = Vec::new();
    let mut real_columns: Vec<usize> = Vec::new();
    if nu == 1 {
        if neg_pos.is_empty() || pos_neg.is_empty() {
            return Err(LinalgError::Eigenstructure(
                "odd negative parity without matching (-,+) and (+,-) directions".into(),
            ));
        }
        for class in [&mut neg_pos, &mut neg_neg, &mut pos_neg] {
            let (v, la, lc) = class.remove(0);
            real_columns.push(cols.cols.len());
            cols.push(v, la, lc);
        }
    }
    for class in [neg_neg, neg_pos, pos_neg] {
        if class.len() % 2 == 1 {
            return Err(LinalgError::Eigenstructure(
                "negative real directions do not pair up (determinant sign inconsistent)".into(),
            ));
        }
        for (v, la, lc) in class {
            let start = cols.cols.len();
            if start % 2 == (if nu == 1 { 1 } else { 0 }) {
                slots.push(RotSlot {
                    start,
                    phase_a: if la.re < 0.0 { 1.0 } else { 0.0 },
                    phase_c: if lc.re < 0.0 { 1.0 } else { 0.0 },
                });
            }
            real_columns.push(start);
            cols.push(v, la, lc);
        }
    }
    let complex_start = cols.cols.len();
    for ((v, la), lc) in complex_cols.cols.into_iter().zip(complex_cols.lambda_a).zip(complex_cols.lambda_c) {
        cols.push(v, la, lc);
    }
    let mut complex_slots = Vec::new();
    let mut j = complex_start;
    while j < cols.cols.len() {
        complex_slots.push(RotSlot {
            start: j,
            phase_a: slot_phase(cols.lambda_a[j], tol),
            phase_c: slot_phase(cols.lambda_c[j], tol),
        });
        j += 2;
    }
    for (v, la, lc) in pos_pos {
        real_columns.push(cols.cols.len());
        cols.push(v, la, lc);
    }

    let mut b = SquareMatrix::from_columns(&cols.cols);
    if b.determinant() < 0.0 {
        if let Some(&j) = real_columns.last() {
            b.column_mut(j).neg_mut();
        } else {
            let slot = &mut complex_slots[0];
            b.column_mut(slot.start + 1).neg_mut();
            slot.phase_a = normalize_phase(-slot.phase_a);
            slot.phase_c = normalize_phase(-slot.phase_c);
        }
    }
    slots.extend(complex_slots.iter().copied());
    let b_inv = b
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| LinalgError::Eigenstructure("eigenbasis is singular".into()))?;

    let is_identity = b == SquareMatrix::identity(n, n);
    let polar = if is_identity {
        None
    } else {
        let (q, p) = polar_decomposition(&b);
        Some((orthogonal_log(&q)?, p))
    };
    let layout = Arc::new(Layout { n, b, b_inv, polar, slots });

    let side = |which: Which| -> Side {
        let lambdas = match which {
            Which::A => &cols.lambda_a,
            Which::C => &cols.lambda_c,
        };
        let start = match which {
            Which::A => pair.a().clone(),
            Which::C => pair.c().clone(),
        };
        let mut unit = SquareMatrix::zeros(n, n);
        for (j, lambda) in lambdas.iter().enumerate() {
            unit[(j, j)] = if lambda.re < 0.0 { -1.0 } else { 1.0 };
        }
        for slot in &layout.slots {
            let phase = match which {
                Which::A => slot.phase_a,
                Which::C => slot.phase_c,
            };
            write_slot(&mut unit, slot.start, rot(phase));
        }
        let moduli: Vec<f64> = lambdas.iter().map(|z| z.norm()).collect();
        let mut scaled = unit.clone();
        for (j, m) in moduli.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*m);
        }
        let semisimple = if is_identity { scaled } else { &layout.b * scaled * &layout.b_inv };
        Side { start, semisimple, unit, moduli }
    };

    let stages: Vec<Stage> = STAGES
        .iter()
        .enumerate()
        .map(|(i, label)| Stage {
            start: i as f64 * 0.25,
            end: (i + 1) as f64 * 0.25,
            label: label.clone(),
        })
        .collect();
    let alpha_path = Arc::new(FourStagePath { layout: layout.clone(), side: side(Which::A), which: Which::A });
    let gamma_path = Arc::new(FourStagePath { layout: layout.clone(), side: side(Which::C), which: Which::C });
    let alpha = SampledPath::from_path(alpha_path, grid, stages.clone());
    let gamma = SampledPath::from_path(gamma_path, grid, stages);

    let mut max_commutator: f64 = 0.0;
    let mut min_det = f64::INFINITY;
    for ((t, a), (_, c)) in alpha.samples().iter().zip(gamma.samples()) {
        max_commutator = max_commutator.max(commutator_residual(a, c));
        let det = a.determinant().min(c.determinant());
        if !(det > 1e-12) {
            return Err(LinalgError::PathDegenerate { t: *t, det });
        }
        min_det = min_det.min(det);
    }
    let canonical = canonical_pair(n, nu)?;
    let endpoint_error = max_abs(&(alpha.end() - canonical.a())).max(max_abs(&(gamma.end() - canonical.c())));
    Ok(CommutingPaths {
        alpha,
        gamma,
        nu,
        basis: layout.b.clone(),
        max_commutator,
        min_det,
        endpoint_error,
        structure,
    })
}

fn normalize_phase(p: f64) -> f64 {
    if p <= -1.0 {
        p + 2.0
    } else {
        p
    }
}
