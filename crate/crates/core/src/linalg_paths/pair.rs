
use super::matrix::{canonical_ri, canonical_rk, commutator_residual, max_abs};
use super::{negative_parity, LinalgError, Result};
use crate::SquareMatrix;

/// Default commutation tolerance for [`CommutingPair::new`] callers that have
/// no better estimate.
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-10;

/// A pair of commuting real square matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingPair {
    a: SquareMatrix,
    c: SquareMatrix,
    tol: f64,
}

impl CommutingPair {
    /// Commuting pair in GL⁺(n): both determinants must be positive.
    pub fn new(a: SquareMatrix, c: SquareMatrix, tol: f64) -> Result<Self> {
        let pair = Self::general(a, c, tol)?;
        for (which, m) in [("a", &pair.a), ("c", &pair.c)] {
            let det = m.determinant();
            if !(det > 1e-10) {
                return Err(LinalgError::NotOrientationPreserving { which, det });
            }
        }
        Ok(pair)
    }

    /// Commuting pair with no condition on the determinants.
    ///
    /// Enough for eigenstructure and parity queries; path synthesis needs
    /// [`CommutingPair::new`].
    pub fn general(a: SquareMatrix, c: SquareMatrix, tol: f64) -> Result<Self> {
        for m in [&a, &c] {
            if !m.is_square() {
                return Err(LinalgError::NotSquare { rows: m.nrows(), cols: m.ncols() });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(LinalgError::NonFinite);
            }
        }
        if a.nrows() != c.nrows() {
            return Err(LinalgError::DimensionMismatch(a.nrows(), c.nrows()));
        }
        if !(tol >= 0.0) {
            return Err(LinalgError::NonCommuting { residual: f64::NAN, tol });
        }
        let residual = commutator_residual(&a, &c);
        if residual > tol {
            return Err(LinalgError::NonCommuting { residual, tol });
        }
        Ok(Self { a, c, tol })
    }

    /// Tolerance scaled to the operands: `1e-10 · max(1, ‖A‖·‖C‖)`.
    pub fn with_relative_tol(a: SquareMatrix, c: SquareMatrix) -> Result<Self> {
        let scale = (max_abs(&a) * max_abs(&c)).max(1.0);
        let n = a.nrows().max(1) as f64;
        Self::new(a, c, DEFAULT_COMMUTE_TOL * scale * n)
    }

    pub fn a(&self) -> &SquareMatrix {
        &self.a
    }

    pub fn c(&self) -> &SquareMatrix {
        &self.c
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.a.determinant() > 0.0 && self.c.determinant() > 0.0
    }

    /// `(B⁻¹AB, B⁻¹CB)`, or `None` if `B` is singular.
    pub fn conjugate_by(&self, b: &SquareMatrix) -> Option<Self> {
        let b_inv = b.clone().lu().try_inverse()?;
        let a = &b_inv * &self.a * b;
        let c = &b_inv * &self.c * b;
        let cond = (max_abs(b) * max_abs(&b_inv)).max(1.0);
        let tol = (self.tol * cond * cond).max(commutator_residual(&a, &c));
        Self::general(a, c, tol).ok()
    }
}

/// `(r_k^ν ⊕ I_{n−3}, r_i^ν ⊕ I_{n−3})` with entries in `{−1, 0, 1}`.
pub fn canonical_pair(n: usize, nu: u8) -> Result<CommutingPair> {
    if n < 3 {
        return Err(LinalgError::DimensionTooSmall(n));
    }
    let (a, c) = match nu {
        0 => (SquareMatrix::identity(n, n), SquareMatrix::identity(n, n)),
        1 => (canonical_rk(n), canonical_ri(n)),
        other => return Err(LinalgError::InvalidParity(other)),
    };
    CommutingPair::new(a, c, 0.0)
}

/// The standard skew form `J = [[0, I], [−I, 0]]` on ℝ^{2m}.
pub fn standard_symplectic_form(n: usize) -> Result<SquareMatrix> {
    if n % 2 == 1 {
        return Err(LinalgError::OddDimension(n));
    }
    let m = n / 2;
    let mut j = SquareMatrix::zeros(n, n);
    for i in 0..m {
        j[(i, m + i)] = 1.0;
        j[(m + i, i)] = -1.0;
    }
    Ok(j)
}

/// Checks that both matrices preserve `omega` and reports whether the
/// negative parity vanishes, as it must for symplectic pairs.
pub fn symplectic_parity_check(pair: &CommutingPair, omega: &SquareMatrix) -> Result<bool> {
    let n = pair.n();
    if n % 2 == 1 {
        return Err(LinalgError::OddDimension(n));
    }
    if omega.nrows() != n || omega.ncols() != n {
        return Err(LinalgError::DimensionMismatch(n, omega.nrows()));
    }
    let residual = [pair.a(), pair.c()]
        .iter()
        .map(|m| max_abs(&(m.transpose() * omega * *m - omega)))
        .fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(LinalgError::NotSymplectic(residual));
    }
    Ok(negative_parity(pair)? == 0)
}
