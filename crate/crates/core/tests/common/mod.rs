//! Shared generators for the integration tests.
#![allow(dead_code)]

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistlab_core::linalg_paths::CommutingPair;
use twistlab_core::SquareMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, n, |_, _| {
        // Box-Muller keeps the generator free of extra dependencies.
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    })
}

fn poly_of(m: &SquareMatrix, coeffs: &[f64]) -> SquareMatrix {
    let n = m.nrows();
    let mut out = SquareMatrix::zeros(n, n);
    let mut power = SquareMatrix::identity(n, n);
    for &c in coeffs {
        out += &power * c;
        power = &power * m;
    }
    out
}

fn eval_poly(z: Complex<f64>, coeffs: &[f64]) -> Complex<f64> {
    coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn min_gap(values: &[Complex<f64>]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in 0..i {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

/// A commuting pair `(p(M), q(M))` with `M` Gaussian and `p, q` random
/// quadratics, resampled until both determinants are positive, the
/// eigenvalues of `M`, `p(M)` and `q(M)` are well separated.
pub fn random_commuting_pair(rng: &mut ChaCha8Rng, n: usize) -> CommutingPair {
    loop {
        let m = gaussian_matrix(rng, n) / (n as f64).sqrt();
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
        let q: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
        let Some(schur) = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 5000) else {
            continue;
        };
        let eig: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
        let ea: Vec<Complex<f64>> = eig.iter().map(|&z| eval_poly(z, &p)).collect();
        let ec: Vec<Complex<f64>> = eig.iter().map(|&z| eval_poly(z, &q)).collect();
        let smallest = ea.iter().chain(&ec).map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if min_gap(&eig) < 0.1 || min_gap(&ea) < 0.1 || min_gap(&ec) < 0.1 || smallest < 0.2 {
            continue;
        }
        let a = poly_of(&m, &p);
        let c = poly_of(&m, &q);
        if a.determinant() <= 0.05 || c.determinant() <= 0.05 {
            continue;
        }
        if let Ok(pair) = CommutingPair::with_relative_tol(a, c) {
            return pair;
        }
    }
}

/// A random orthogonal-ish well-conditioned change of basis `I + 0.3·G`.
pub fn random_conjugator(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
    loop {
        let b = SquareMatrix::identity(n, n) + gaussian_matrix(rng, n) * (0.3 / (n as f64).sqrt());
        let s = b.singular_values();
        if s.min() > 0.3 {
            return b;
        }
    }
}

/// A Gaussian direction scaled to a uniform radius in `[lo, hi)`.
pub fn vector_in_shell(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> twistlab_core::Vector {
    let g = gaussian_matrix(rng, n);
    let dir = g.column(0).normalize();
    dir * rng.random_range(lo..hi)
}
