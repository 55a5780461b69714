//! Symmetry of cutting polynomials under `a: z_{0,0} ↦ −z_{0,0}` and complex conjugation.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::exact::GaussianRational;
use super::poly::{MultiHomogeneousPolynomial, PolySystem};

/// The three conditions checked on one polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetryConditions {
    /// All coefficients real. Always true for rational input.
    pub real_coefficients: bool,
    /// Every monomial has an even exponent of `z_{0,0}`.
    pub even_first_exponent: bool,
    /// Every monomial involves some coordinate other than the last one of each factor.
    pub positive_non_last: bool,
}

impl SymmetryConditions {
    pub fn all(&self) -> bool {
        self.real_coefficients && self.even_first_exponent && self.positive_non_last
    }
}

/// Per-polynomial symmetry conditions of a system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub per_polynomial: Vec<SymmetryConditions>,
}

impl SymmetryReport {
    pub fn all_hold(&self) -> bool {
        self.per_polynomial.iter().all(SymmetryConditions::all)
    }
}

fn conditions(p: &MultiHomogeneousPolynomial) -> SymmetryConditions {
    let offsets = super::poly::factor_offsets(p.factor_dims());
    let is_last: Vec<bool> = {
        let mut v = vec![false; p.nvars()];
        for (&o, &d) in offsets.iter().zip(p.factor_dims()) {
            v[o + d] = true;
        }
        v
    };
    let mut even = true;
    let mut positive = true;
    for (e, _) in p.poly().terms() {
        even &= e[0] % 2 == 0;
        positive &= e.iter().zip(&is_last).any(|(&k, &last)| k > 0 && !last);
    }
    SymmetryConditions { real_coefficients: true, even_first_exponent: even, positive_non_last: positive }
}

pub fn symmetry_conditions(sys: &PolySystem) -> SymmetryReport {
    SymmetryReport { per_polynomial: sys.polys().iter().map(conditions).collect() }
}

/// Outcome of the exact invariance identities `p∘a = p` and `p∘c = conj(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    /// `p(a(z)) = p(z)` as a polynomial identity (coefficient comparison).
    pub a_identity: bool,
    /// `p(c(z)) = conj(p(z))` as a polynomial identity.
    pub c_identity: bool,
    /// The same identities evaluated exactly at random Gaussian-rational points.
    pub a_sampled: bool,
    pub c_sampled: bool,
    pub samples: usize,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.a_identity && self.c_identity
    }

    /// Whether the sampled cross-check agrees with the coefficient comparison.
    pub fn consistent(&self) -> bool {
        self.a_identity == self.a_sampled && self.c_identity == self.c_sampled
    }
}

fn random_gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    let q = |rng: &mut ChaCha8Rng| {
        let num: i64 = rng.random_range(-50..=50);
        let den: i64 = rng.random_range(1..=17);
        BigRational::new(num.into(), den.into())
    };
    let re = q(rng);
    let im = q(rng);
    GaussianRational::new(re, im)
}

/// Checks both identities by coefficients, then cross-checks on `num_samples`
/// random exact points drawn from `seed`.
pub fn invariance_check(sys: &PolySystem, num_samples: usize, seed: u64) -> InvarianceReport {
    let mut a_identity = true;
    // Rational coefficients are their own conjugates.
    let c_identity = true;
    for p in sys.polys() {
        let flipped = p.poly().map_coefficients(|e, c| if e[0] % 2 == 1 { -c.clone() } else { c.clone() });
        a_identity &= flipped == *p.poly();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a_sampled = true;
    let mut c_sampled = true;
    for _ in 0..num_samples {
        let z: Vec<GaussianRational> = (0..sys.nvars()).map(|_| random_gaussian(&mut rng)).collect();
        let mut az = z.clone();
        az[0] = az[0].neg();
        let cz: Vec<GaussianRational> = z.iter().map(GaussianRational::conj).collect();
        for p in sys.polys() {
            let pz = p.poly().eval_gaussian(&z);
            a_sampled &= p.poly().eval_gaussian(&az) == pz;
            c_sampled &= p.poly().eval_gaussian(&cz) == pz.conj();
        }
    }
    InvarianceReport { a_identity, c_identity, a_sampled, c_sampled, samples: num_samples }
}
