use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{Result, SpinError};
use crate::SquareMatrix;

/// `w + x·i + y·j + z·k` over any numeric ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }
}

impl<T: Zero + One> Quaternion<T> {
    pub fn one() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }
}

impl<T: Clone + Neg<Output = T>> Quaternion<T> {
    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }
}

impl<T: Clone + Add<Output = T> + Mul<Output = T>> Quaternion<T> {
    pub fn norm_sq(&self) -> T {
        self.w.clone() * self.w.clone()
            + self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }
}

impl<T> Quaternion<T>
where
    T: Clone
        + Zero
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + std::ops::Div<Output = T>,
{
    /// `q̄ / |q|²`, or `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(c.w / n.clone(), c.x / n.clone(), c.y / n.clone(), c.z / n))
    }

    /// Group commutator `p q p⁻¹ q⁻¹`.
    pub fn commutator(&self, other: &Self) -> Option<Self> {
        Some(self.clone() * other.clone() * self.inverse()? * other.inverse()?)
    }
}

impl<T: Add<Output = T>> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Sub<Output = T>> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Neg<Output = T>> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T> Mul for Quaternion<T>
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        let (e, f, g, h) = (o.w, o.x, o.y, o.z);
        Self::new(
            a.clone() * e.clone() - b.clone() * f.clone() - c.clone() * g.clone() - d.clone() * h.clone(),
            a.clone() * f.clone() + b.clone() * e.clone() + c.clone() * h.clone() - d.clone() * g.clone(),
            a.clone() * g.clone() - b.clone() * h.clone() + c.clone() * e.clone() + d.clone() * f.clone(),
            a * h + b * g - c * f + d * e,
        )
    }
}

impl Quaternion<f64> {
    /// `exp(θ·u)` for a unit imaginary axis `u = (ux, uy, uz)`.
    pub fn exp_axis(theta: f64, axis: [f64; 3]) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s * axis[0], s * axis[1], s * axis[2])
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

/// A quaternion of norm one (within `1e−12`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion<f64>);

impl UnitQuaternion {
    pub fn new(q: Quaternion<f64>) -> Result<Self> {
        let norm = q.norm();
        if (norm - 1.0).abs() > 1e-12 || !norm.is_finite() {
            return Err(SpinError::NotUnit(norm));
        }
        Ok(Self(q))
    }

    /// Rescales a nonzero quaternion to unit length.
    pub fn normalize(q: Quaternion<f64>) -> Result<Self> {
        let norm = q.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(SpinError::NotUnit(norm));
        }
        Ok(Self(Quaternion::new(q.w / norm, q.x / norm, q.y / norm, q.z / norm)))
    }

    pub fn quaternion(&self) -> Quaternion<f64> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.conj())
    }
}

/// Matrix of `v ↦ q⁻¹ v q` on `Im ℍ` in the basis `(i, j, k)`.
pub fn quaternion_rotation(q: &UnitQuaternion) -> SquareMatrix {
    let q = q.quaternion();
    let q_inv = q.conj();
    let mut m = SquareMatrix::zeros(3, 3);
    let basis = [Quaternion::<f64>::i(), Quaternion::j(), Quaternion::k()];
    for (col, e) in basis.iter().enumerate() {
        let image = q_inv * *e * q;
        m[(0, col)] = image.x;
        m[(1, col)] = image.y;
        m[(2, col)] = image.z;
    }
    m
}

/// `k · i · k⁻¹ · i⁻¹` in exact rational arithmetic.
pub fn quaternion_commutator_witness() -> Quaternion<Rational64> {
    let k = Quaternion::<Rational64>::k();
    let i = Quaternion::<Rational64>::i();
    k.commutator(&i).expect("units are invertible")
}
