//! The witness system `q_A` and its exact Kronecker-delta identity on the
//! line `A = {[a₀:0:⋯:0:a_n]}`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{MultiHomogeneousPolynomial, PolySystem, Polynomial};
use super::{PolyError, Result};

/// Builds `q_{A,i}` for degrees `d = (d_1, …, d_m)` on `P^n`:
/// `z_i` if `d_i = 1`; `z₀^{d−1}z_i + z₀^{d−1}z_n + z_i z_n^{d−1}` if `d_i > 1` is odd;
/// `z₀^{d} + z_i z_n^{d−1}` if `d_i` is even.
pub fn witness_qa(d: &[u32], n: usize) -> Result<PolySystem> {
    if d.is_empty() {
        return Err(PolyError::BadDegrees("empty degree list".into()));
    }
    if d.contains(&0) {
        return Err(PolyError::BadDegrees(format!("degrees {d:?} contain 0")));
    }
    if d.len() >= n {
        return Err(PolyError::BadDegrees(format!("need m = {} < n = {n}", d.len())));
    }
    let nv = n + 1;
    let z = |i: usize| Polynomial::var(nv, i);
    let polys = d
        .iter()
        .enumerate()
        .map(|(k, &di)| {
            let i = k + 1;
            let q = if di == 1 {
                z(i)
            } else if di % 2 == 1 {
                let lead = z(0).pow(di - 1);
                lead.mul(&z(i)).add(&lead.mul(&z(n))).add(&z(i).mul(&z(n).pow(di - 1)))
            } else {
                z(0).pow(di).add(&z(i).mul(&z(n).pow(di - 1)))
            };
            MultiHomogeneousPolynomial::new(vec![n], q)
        })
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(polys)
}

/// Checks the witness identity for an arbitrary single-factor system with
/// `m < n`: at every point of `A` where `q_i` vanishes, the row
/// `(∂q_i/∂z_1, …, ∂q_i/∂z_m)` is the `i`-th standard basis row.
///
/// The restriction of `q_i` to `A` is a binary form `a₀^p a_n^q r'`. Only a
/// constant `r'` can be settled exactly over ℚ; anything else returns false.
pub fn kronecker_check(sys: &PolySystem) -> bool {
    if sys.factor_dims().len() != 1 {
        return false;
    }
    let n = sys.factor_dims()[0];
    let m = sys.m();
    let nv = n + 1;
    let zero = BigRational::zero();
    let mut first = vec![zero.clone(); nv];
    first[0] = BigRational::one();
    let mut last = vec![zero.clone(); nv];
    last[n] = BigRational::one();

    for (k, q) in sys.polys().iter().enumerate() {
        let mut r = q.poly().clone();
        for j in 1..n {
            r = r.substitute(j, &zero);
        }
        let degree = q.multidegree()[0];
        let mut zeros: Vec<&Vec<BigRational>> = Vec::new();
        if r.is_zero() {
            // All of A lies on q_i = 0; only a linear form has a constant gradient.
            if degree > 1 {
                return false;
            }
            zeros.push(&first);
            zeros.push(&last);
        } else {
            if r.num_terms() != 1 {
                return false;
            }
            let (e, _) = r.terms().next().expect("one term");
            if e[0] > 0 {
                zeros.push(&last);
            }
            if e[n] > 0 {
                zeros.push(&first);
            }
        }
        for point in zeros {
            for j in 1..=m {
                let value = q.poly().derivative(j).eval_rational(point);
                let expected = if j == k + 1 { BigRational::one() } else { BigRational::zero() };
                if value != expected {
                    return false;
                }
            }
        }
    }
    true
}

/// [`kronecker_check`] applied to [`witness_qa`]`(d, n)`.
pub fn kronecker_witness_check(d: &[u32], n: usize) -> Result<bool> {
    Ok(kronecker_check(&witness_qa(d, n)?))
}
