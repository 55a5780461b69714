//! Points of products of projective spaces and the involutions `a`, `c`.

use std::fmt;

use nalgebra::Complex;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::{PolyError, Result};

/// Relative tolerance for choosing the normalizing entry among near-ties.
const PIVOT_TIE: f64 = 1e-12;

/// A point `[z_0] × ⋯ × [z_ν]`, each factor scaled so that its first
/// largest-modulus entry equals 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    factors: Vec<Vec<Complex<f64>>>,
}

fn normalize_factor(v: &mut [Complex<f64>]) -> Result<()> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Err(PolyError::ZeroFactor);
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - PIVOT_TIE))
        .expect("max is attained");
    let p = v[pivot];
    for (k, z) in v.iter_mut().enumerate() {
        *z = if k == pivot { Complex::new(1.0, 0.0) } else { *z / p };
    }
    Ok(())
}

impl ProjectivePoint {
    pub fn new(mut factors: Vec<Vec<Complex<f64>>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(PolyError::ZeroFactor);
        }
        for f in factors.iter_mut() {
            if f.len() < 2 {
                return Err(PolyError::BadShape("projective factors need at least 2 coordinates".into()));
            }
            normalize_factor(f)?;
        }
        Ok(Self { factors })
    }

    /// Real coordinates, one slice per factor.
    pub fn from_real(factors: &[&[f64]]) -> Result<Self> {
        Self::new(factors.iter().map(|f| f.iter().map(|&x| Complex::new(x, 0.0)).collect()).collect())
    }

    /// Splits a flat homogeneous coordinate vector by factor dimensions.
    pub fn from_flat(factor_dims: &[usize], flat: &[Complex<f64>]) -> Result<Self> {
        let total: usize = factor_dims.iter().map(|d| d + 1).sum();
        if flat.len() != total {
            return Err(PolyError::BadShape(format!("{} coordinates, expected {total}", flat.len())));
        }
        let mut factors = Vec::with_capacity(factor_dims.len());
        let mut at = 0;
        for &d in factor_dims {
            factors.push(flat[at..at + d + 1].to_vec());
            at += d + 1;
        }
        Self::new(factors)
    }

    /// The point whose factor `f` is the basis vector `e_{choice[f]}`.
    pub fn basis(factor_dims: &[usize], choice: &[usize]) -> Result<Self> {
        if factor_dims.len() != choice.len() || choice.iter().zip(factor_dims).any(|(c, d)| c > d) {
            return Err(PolyError::BadShape(format!("basis choice {choice:?} for factors {factor_dims:?}")));
        }
        Self::new(
            factor_dims
                .iter()
                .zip(choice)
                .map(|(&d, &c)| {
                    let mut v = vec![Complex::new(0.0, 0.0); d + 1];
                    v[c] = Complex::new(1.0, 0.0);
                    v
                })
                .collect(),
        )
    }

    /// `[0:⋯:0:1]` in every factor.
    pub fn last_basis(factor_dims: &[usize]) -> Self {
        Self::basis(factor_dims, factor_dims).expect("valid choice")
    }

    pub fn factors(&self) -> &[Vec<Complex<f64>>] {
        &self.factors
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.len() - 1).collect()
    }

    pub fn flat(&self) -> Vec<Complex<f64>> {
        self.factors.iter().flatten().copied().collect()
    }

    /// Maximum coordinate difference of the normalized representatives.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.factor_dims() != other.factor_dims() {
            return f64::INFINITY;
        }
        self.flat().iter().zip(other.flat()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Re-applies the normalization (a no-op on normalized points).
    pub fn renormalized(&self) -> Self {
        Self::new(self.factors.clone()).expect("normalized point has nonzero factors")
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, fac) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "x")?;
            }
            write!(f, "[")?;
            for (i, z) in fac.iter().enumerate() {
                if i > 0 {
                    write!(f, ":")?;
                }
                if z.im == 0.0 {
                    write!(f, "{}", z.re)?;
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)?;
                }
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for ProjectivePoint {
    /// Factors as lists of `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.factors.len()))?;
        for f in &self.factors {
            let pairs: Vec<[f64; 2]> = f.iter().map(|z| [z.re, z.im]).collect();
            seq.serialize_element(&pairs)?;
        }
        seq.end()
    }
}

/// `a`: negate `z_{0,0}`.
pub fn involution_a(z: &ProjectivePoint) -> ProjectivePoint {
    let mut factors = z.factors.clone();
    factors[0][0] = -factors[0][0];
    ProjectivePoint::new(factors).expect("nonzero factors stay nonzero")
}

/// `c`: conjugate every coordinate.
pub fn involution_c(z: &ProjectivePoint) -> ProjectivePoint {
    let factors = z.factors.iter().map(|f| f.iter().map(|w| w.conj()).collect()).collect();
    ProjectivePoint::new(factors).expect("nonzero factors stay nonzero")
}

pub fn involution_maps(z: &ProjectivePoint) -> (ProjectivePoint, ProjectivePoint) {
    (involution_a(z), involution_c(z))
}
