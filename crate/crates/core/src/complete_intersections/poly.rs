//! Sparse polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exact::GaussianRational;
use super::{PolyError, Result};

/// Exponent vector over the flattened variable list.
pub type Monomial = Vec<u32>;

/// A variable `z_{factor,index}` of a product of projective spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarIndex {
    pub factor: usize,
    pub index: usize,
}

/// Sparse polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The single variable `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Monomial, coeff: BigRational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, summing repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (BigRational, Monomial)>,
    {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponents: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigRational {
        self.terms.get(exponents).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[var])));
            }
        }
        out
    }

    /// Substitutes `x_var = value` (a rational constant).
    pub fn substitute(&self, var: usize, value: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] = 0;
            let factor = pow_rational(value, k);
            out.add_term(e2, c * factor);
        }
        out
    }

    /// Applies `f` to every coefficient, dropping the ones that become zero.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Monomial, &BigRational) -> BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(e, c));
        }
        out
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= pow_rational(x, k);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_gaussian(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = GaussianRational::from_real(c.clone());
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&x.pow(k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Total degree of the largest term (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }
}

pub(crate) fn pow_rational(x: &BigRational, k: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..k {
        out *= x;
    }
    out
}

/// Offsets of each factor's first variable in the flattened variable list.
pub(crate) fn factor_offsets(factor_dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(factor_dims.len());
    let mut acc = 0;
    for &d in factor_dims {
        offsets.push(acc);
        acc += d + 1;
    }
    offsets
}

pub(crate) fn flat_len(factor_dims: &[usize]) -> usize {
    factor_dims.iter().map(|d| d + 1).sum()
}

/// Multihomogeneous polynomial on `P^{n_0} × ⋯ × P^{n_ν}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiHomogeneousPolynomial {
    factor_dims: Vec<usize>,
    poly: Polynomial,
    multidegree: Vec<u32>,
}

impl MultiHomogeneousPolynomial {
    /// Validates multihomogeneity and infers the multidegree.
    pub fn new(factor_dims: Vec<usize>, poly: Polynomial) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(PolyError::InvalidSystem("no projective factors".into()));
        }
        if poly.nvars() != flat_len(&factor_dims) {
            return Err(PolyError::InvalidSystem(format!(
                "polynomial has {} variables, factors need {}",
                poly.nvars(),
                flat_len(&factor_dims)
            )));
        }
        if poly.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let offsets = factor_offsets(&factor_dims);
        let degrees_of = |e: &Monomial| -> Vec<u32> {
            offsets
                .iter()
                .zip(&factor_dims)
                .map(|(&o, &d)| e[o..=o + d].iter().sum())
                .collect()
        };
        // Canonical display order: the first displayed term fixes the multidegree.
        let mut iter = poly.terms().rev();
        let (e0, _) = iter.next().expect("nonzero polynomial");
        let multidegree = degrees_of(e0);
        for (e, c) in iter {
            let found = degrees_of(e);
            if found != multidegree {
                let term = format_term(&factor_dims, e, c);
                return Err(PolyError::NotHomogeneous { term, found, expected: multidegree });
            }
        }
        Ok(Self { factor_dims, poly, multidegree })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn multidegree(&self) -> &[u32] {
        &self.multidegree
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    /// Flat position of `z_{factor,index}`.
    pub fn var_position(&self, v: VarIndex) -> usize {
        factor_offsets(&self.factor_dims)[v.factor] + v.index
    }

    /// Exponent of `z_{factor,index}` in a flattened exponent vector.
    pub fn exponent(&self, e: &Monomial, v: VarIndex) -> u32 {
        e[self.var_position(v)]
    }
}

impl fmt::Display for MultiHomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for (k, (e, c)) in self.poly.terms().rev().enumerate() {
            let neg = c.is_negative();
            let body = format_term(&self.factor_dims, e, &c.abs());
            match (k, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Formats `c·z^e`; `c` is printed as is (callers pass |c| for signed output).
fn format_term(factor_dims: &[usize], e: &Monomial, c: &BigRational) -> String {
    let mut parts = Vec::new();
    let unit = c.is_one() && e.iter().any(|&k| k > 0);
    if !unit {
        parts.push(if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) });
    }
    let offsets = factor_offsets(factor_dims);
    for (fct, (&o, &d)) in offsets.iter().zip(factor_dims).enumerate() {
        for i in 0..=d {
            let k = e[o + i];
            if k == 0 {
                continue;
            }
            let name = if factor_dims.len() > 1 { format!("z{fct}_{i}") } else { format!("z{i}") };
            parts.push(if k == 1 { name } else { format!("{name}^{k}") });
        }
    }
    parts.join("*")
}

/// A system of multihomogeneous polynomials on a common product of projective spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    factor_dims: Vec<usize>,
    polys: Vec<MultiHomogeneousPolynomial>,
}

impl PolySystem {
    /// Requires `0 < m < Σ n_f`, shared factors and multidegrees without zero entries.
    pub fn new(polys: Vec<MultiHomogeneousPolynomial>) -> Result<Self> {
        let first = polys.first().ok_or_else(|| PolyError::InvalidSystem("empty system".into()))?;
        let factor_dims = first.factor_dims().to_vec();
        for (k, p) in polys.iter().enumerate() {
            if p.factor_dims() != factor_dims.as_slice() {
                return Err(PolyError::InvalidSystem(format!(
                    "polynomial {k} lives on factors {:?}, expected {:?}",
                    p.factor_dims(),
                    factor_dims
                )));
            }
            if p.multidegree().contains(&0) {
                return Err(PolyError::InvalidSystem(format!(
                    "polynomial {k} has multidegree {:?} with a zero entry",
                    p.multidegree()
                )));
            }
        }
        let n: usize = factor_dims.iter().sum();
        if polys.len() >= n {
            return Err(PolyError::InvalidSystem(format!(
                "{} polynomials on a space of dimension {n}: need m < n",
                polys.len()
            )));
        }
        Ok(Self { factor_dims, polys })
    }

    pub fn single(poly: MultiHomogeneousPolynomial) -> Result<Self> {
        Self::new(vec![poly])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn polys(&self) -> &[MultiHomogeneousPolynomial] {
        &self.polys
    }

    /// Number of equations `m`.
    pub fn m(&self) -> usize {
        self.polys.len()
    }

    /// Ambient dimension `n = Σ n_f`.
    pub fn n(&self) -> usize {
        self.factor_dims.iter().sum()
    }

    /// Complex dimension `n − m` of the cut-out set.
    pub fn complex_dimension(&self) -> usize {
        self.n() - self.m()
    }

    /// Total number of homogeneous coordinates `Σ (n_f + 1)`.
    pub fn nvars(&self) -> usize {
        flat_len(&self.factor_dims)
    }

    pub fn offsets(&self) -> Vec<usize> {
        factor_offsets(&self.factor_dims)
    }

    /// `m × (ν+1)` multidegree matrix.
    pub fn degree_matrix(&self) -> Vec<Vec<u32>> {
        self.polys.iter().map(|p| p.multidegree().to_vec()).collect()
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.polys.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
