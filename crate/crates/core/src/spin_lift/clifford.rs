use super::{Result, SpinError};
use crate::SquareMatrix;

/// Largest ambient dimension for which [`CliffordElement`] is allowed
/// (the algebra has `2ⁿ` coefficients).
pub const MAX_CLIFFORD_DIM: usize = 10;

/// Element of the real Clifford algebra `Cl(n)` with `e_i² = −1`.
///
/// Coefficients are stored densely, indexed by blade bitmask: bit `i − 1`
/// set means `e_i` is a factor, factors in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    n: usize,
    coeffs: Vec<f64>,
}

/// Sign of `e_A e_B` relative to `e_{A xor B}` for blade bitmasks `A`, `B`.
fn blade_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut shifted = a >> 1;
    while shifted != 0 {
        swaps += (shifted & b).count_ones();
        shifted >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl CliffordElement {
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_CLIFFORD_DIM {
            return Err(SpinError::DimensionTooLarge(n));
        }
        Ok(Self { n, coeffs: vec![0.0; 1 << n] })
    }

    pub fn scalar(n: usize, value: f64) -> Result<Self> {
        let mut out = Self::zero(n)?;
        out.coeffs[0] = value;
        Ok(out)
    }

    /// Single blade `coef · e_{i₁} ⋯ e_{i_k}` from 1-based generator indices
    /// in any order.
    pub fn blade(n: usize, indices: &[usize], coef: f64) -> Result<Self> {
        let mut out = Self::scalar(n, coef)?;
        for &i in indices {
            assert!(i >= 1 && i <= n, "generator index {i} out of range 1..={n}");
            out = out.mul(&Self::generator(n, i)?);
        }
        Ok(out)
    }

    /// Generator `e_i`, `1 ≤ i ≤ n`.
    pub fn generator(n: usize, i: usize) -> Result<Self> {
        assert!(i >= 1 && i <= n, "generator index {i} out of range 1..={n}");
        let mut out = Self::zero(n)?;
        out.coeffs[1 << (i - 1)] = 1.0;
        Ok(out)
    }

    /// Bivector `½ Σ_{i<j} Ω_ij e_i e_j` for a skew matrix `Ω`.
    pub fn bivector_from_skew(omega: &SquareMatrix) -> Result<Self> {
        let n = omega.nrows();
        let mut out = Self::zero(n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                out.coeffs[(1 << i) | (1 << j)] = 0.5 * omega[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> f64 {
        self.coeffs[blade]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Largest absolute coefficient outside the scalar blade.
    pub fn non_scalar_max(&self) -> f64 {
        self.coeffs[1..].iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "Clifford dimensions differ");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|x| x * s).collect() }
    }

    /// Geometric product; zero coefficients are skipped.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "Clifford dimensions differ");
        let mut out = vec![0.0; self.coeffs.len()];
        let rhs: Vec<(usize, f64)> =
            other.coeffs.iter().copied().enumerate().filter(|(_, c)| *c != 0.0).collect();
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for &(b, cb) in &rhs {
                out[a ^ b] += blade_sign(a, b) * ca * cb;
            }
        }
        Self { n: self.n, coeffs: out }
    }

    /// Reversion: reverses the order of generators in every blade.
    pub fn reverse(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(blade, c)| {
                let g = blade.count_ones();
                if (g * g.saturating_sub(1) / 2) % 2 == 0 {
                    *c
                } else {
                    -c
                }
            })
            .collect();
        Self { n: self.n, coeffs }
    }

    /// Matrix of `v ↦ S⁻¹ v S` on the vectors, for a unit rotor `S`
    /// (so `S⁻¹ = S̃`).
    pub fn rotor_matrix(&self) -> Result<SquareMatrix> {
        let n = self.n;
        let inv = self.reverse();
        let mut m = SquareMatrix::zeros(n, n);
        for col in 0..n {
            let image = inv.mul(&Self::generator(n, col + 1)?).mul(self);
            for row in 0..n {
                m[(row, col)] = image.coeffs[1 << row];
            }
        }
        Ok(m)
    }
}

/// Exponential by scaling and squaring of the power series; terms below
/// `1e−14` (relative to the running sum) end the series.
pub fn bivector_exp(b: &CliffordElement) -> CliffordElement {
    let n = b.dim();
    let norm = b.norm();
    let mut squarings = 0;
    let mut scaled = b.clone();
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        scaled = b.scale(0.5_f64.powi(squarings as i32));
    }
    let mut sum = CliffordElement::scalar(n, 1.0).expect("dimension already validated");
    let mut term = sum.clone();
    for k in 1..64 {
        term = term.mul(&scaled).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.norm() < 1e-14 * sum.norm().max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}
