use nalgebra::{Complex, SymmetricEigen, SVD};

use super::{LinalgError, Result};
use crate::{ComplexMatrix, SquareMatrix};

/// Largest absolute entry.
pub fn max_abs(m: &SquareMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `‖AC − CA‖_max`.
pub fn commutator_residual(a: &SquareMatrix, c: &SquareMatrix) -> f64 {
    max_abs(&(a * c - c * a))
}

/// Group commutator `A C A⁻¹ C⁻¹`, or `None` if either matrix is singular.
pub fn group_commutator(a: &SquareMatrix, c: &SquareMatrix) -> Option<SquareMatrix> {
    let a_inv = a.clone().lu().try_inverse()?;
    let c_inv = c.clone().lu().try_inverse()?;
    Some(a * c * a_inv * c_inv)
}

/// Block direct sum `a ⊕ b`.
pub fn direct_sum(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = SquareMatrix::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(a);
    out.view_mut((p, p), (q, q)).copy_from(b);
    out
}

/// `m ⊕ I` padded to size `n`.
pub fn embed_top_left(m: &SquareMatrix, n: usize) -> SquareMatrix {
    let k = m.nrows();
    assert!(k <= n, "cannot embed {k}x{k} into {n}x{n}");
    let mut out = SquareMatrix::identity(n, n);
    out.view_mut((0, 0), (k, k)).copy_from(m);
    out
}

/// `(cos πt, sin πt)`, exact at multiples of ½.
pub fn cos_sin_pi(t: f64) -> (f64, f64) {
    let twice = 2.0 * t;
    if twice == twice.round() && twice.abs() < 1e15 {
        match (twice as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        let x = std::f64::consts::PI * t;
        (x.cos(), x.sin())
    }
}

/// `R_k(t)`: rotation by `πt` in the (1,2)-plane of ℝ³.
pub fn rotation_k(t: f64) -> SquareMatrix {
    let (c, s) = cos_sin_pi(t);
    SquareMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
}

/// `R_i(t)`: rotation by `−πt` in the (2,3)-plane of ℝ³.
pub fn rotation_i(t: f64) -> SquareMatrix {
    let (c, s) = cos_sin_pi(t);
    SquareMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c])
}

/// `r_k ⊕ I_{n−3}` with `r_k = diag(−1, −1, 1)`.
pub fn canonical_rk(n: usize) -> SquareMatrix {
    let mut m = SquareMatrix::identity(n, n);
    m[(0, 0)] = -1.0;
    m[(1, 1)] = -1.0;
    m
}

/// `r_i ⊕ I_{n−3}` with `r_i = diag(1, −1, −1)`.
pub fn canonical_ri(n: usize) -> SquareMatrix {
    let mut m = SquareMatrix::identity(n, n);
    m[(1, 1)] = -1.0;
    m[(2, 2)] = -1.0;
    m
}

/// `max(‖RᵀR − I‖_max, |det R − 1|)`.
pub fn so_residual(r: &SquareMatrix) -> f64 {
    let n = r.nrows();
    let orth = max_abs(&(r.transpose() * r - SquareMatrix::identity(n, n)));
    orth.max((r.determinant() - 1.0).abs())
}

pub fn is_special_orthogonal(r: &SquareMatrix, tol: f64) -> bool {
    r.is_square() && so_residual(r) <= tol
}

/// Polar decomposition `B = Q·P` with `Q` orthogonal and `P` symmetric
/// positive definite.
pub fn polar_decomposition(b: &SquareMatrix) -> (SquareMatrix, SquareMatrix) {
    let svd = SVD::new(b.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let q = &u * &v_t;
    let sigma = SquareMatrix::from_diagonal(&svd.singular_values);
    let p = v_t.transpose() * sigma * &v_t;
    let p = (&p + p.transpose()) * 0.5;
    (q, p)
}

const PI_CLUSTER: f64 = 1e-13;

/// Real logarithm of a special orthogonal matrix, a skew matrix `L` with
/// `exp(L) = Q`.
///
/// Uses the split `Q = S + K` into symmetric and skew parts: on a rotation
/// plane of angle `θ ∈ (0, π)` we have `S = cos θ` and `L = θ / sin θ · K`.
/// The `−1` eigenspace is paired into rotations by `π`.
pub fn orthogonal_log(q: &SquareMatrix) -> Result<SquareMatrix> {
    let n = q.nrows();
    if so_residual(q) > 1e-8 {
        return Err(LinalgError::Logarithm(format!(
            "not special orthogonal (residual {:e})",
            so_residual(q)
        )));
    }
    let sym = (q + q.transpose()) * 0.5;
    let skew = (q - q.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut g = nalgebra::DVector::zeros(n);
    let mut minus_one: Vec<usize> = Vec::new();
    for (i, &c) in eig.eigenvalues.iter().enumerate() {
        let c = c.clamp(-1.0, 1.0);
        if 1.0 + c <= PI_CLUSTER {
            minus_one.push(i);
        } else if 1.0 - c < 1e-8 {
            g[i] = 1.0 + (1.0 - c) / 3.0;
        } else {
            g[i] = c.acos() / (1.0 - c * c).sqrt();
        }
    }
    let v = &eig.eigenvectors;
    let g_of_s = v * SquareMatrix::from_diagonal(&g) * v.transpose();
    let mut log = g_of_s * &skew;
    log = (&log - log.transpose()) * 0.5;
    if minus_one.len() % 2 == 1 {
        return Err(LinalgError::Logarithm("odd-dimensional -1 eigenspace".into()));
    }
    for pair in minus_one.chunks(2) {
        let u1 = v.column(pair[0]);
        let u2 = v.column(pair[1]);
        log += (u2 * u1.transpose() - u1 * u2.transpose()) * std::f64::consts::PI;
    }
    let err = max_abs(&(log.clone().exp() - q));
    if err > 1e-8 {
        return Err(LinalgError::Logarithm(format!("exp(log Q) misses Q by {err:e}")));
    }
    Ok(log)
}

/// Orthonormal basis (columns) of the `dim` smallest right singular vectors.
pub(crate) fn null_space_real(k: &SquareMatrix, dim: usize) -> SquareMatrix {
    let cols = k.ncols();
    let svd = SVD::new(k.clone(), false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = SquareMatrix::zeros(cols, dim);
    for j in 0..dim {
        let row = v_t.row(cols - dim + j);
        for i in 0..cols {
            out[(i, j)] = row[i];
        }
    }
    out
}

/// Complex analogue of [`null_space_real`].
pub(crate) fn null_space_complex(k: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    let cols = k.ncols();
    let svd = SVD::new(k.clone(), false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = ComplexMatrix::zeros(cols, dim);
    for j in 0..dim {
        let row = v_t.row(cols - dim + j);
        for i in 0..cols {
            out[(i, j)] = row[i].conj();
        }
    }
    out
}

pub(crate) fn to_complex(m: &SquareMatrix) -> ComplexMatrix {
    m.map(|x| Complex::new(x, 0.0))
}

pub(crate) fn real_part(m: &ComplexMatrix) -> SquareMatrix {
    m.map(|z| z.re)
}

pub(crate) fn imag_part(m: &ComplexMatrix) -> SquareMatrix {
    m.map(|z| z.im)
}
