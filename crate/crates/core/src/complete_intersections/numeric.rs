//! Floating-point evaluation of polynomial systems and their Jacobians.

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::ToPrimitive;
use serde::Serialize;

use super::point::ProjectivePoint;
use super::poly::PolySystem;

/// Largest |value| or |minor| still counted as zero by [`jacobian_minors`].
pub const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
struct Term {
    coeff: Complex<f64>,
    /// `(variable, exponent)` for the nonzero exponents.
    vars: Vec<(usize, u32)>,
}

/// A [`PolySystem`] compiled for complex evaluation.
#[derive(Debug, Clone)]
pub struct NumericSystem {
    nvars: usize,
    max_exp: u32,
    polys: Vec<Vec<Term>>,
}

impl NumericSystem {
    pub fn new(sys: &PolySystem) -> Self {
        let mut max_exp = 1;
        let polys = sys
            .polys()
            .iter()
            .map(|p| {
                p.poly()
                    .terms()
                    .map(|(e, c)| {
                        let vars: Vec<(usize, u32)> =
                            e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k)).collect();
                        max_exp = vars.iter().map(|&(_, k)| k).fold(max_exp, u32::max);
                        Term { coeff: Complex::new(c.to_f64().expect("finite coefficient"), 0.0), vars }
                    })
                    .collect()
            })
            .collect();
        Self { nvars: sys.nvars(), max_exp, polys }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn m(&self) -> usize {
        self.polys.len()
    }

    fn powers(&self, z: &[Complex<f64>]) -> Vec<Vec<Complex<f64>>> {
        z.iter()
            .map(|&x| {
                let mut row = Vec::with_capacity(self.max_exp as usize + 1);
                let mut acc = Complex::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..self.max_exp {
                    acc *= x;
                    row.push(acc);
                }
                row
            })
            .collect()
    }

    pub fn eval(&self, z: &[Complex<f64>]) -> DVector<Complex<f64>> {
        assert_eq!(z.len(), self.nvars);
        let pw = self.powers(z);
        DVector::from_iterator(
            self.m(),
            self.polys.iter().map(|terms| {
                terms
                    .iter()
                    .map(|t| t.vars.iter().fold(t.coeff, |acc, &(v, k)| acc * pw[v][k as usize]))
                    .sum()
            }),
        )
    }

    /// Values and the `m × nvars` matrix of partials in homogeneous coordinates.
    pub fn eval_with_jacobian(&self, z: &[Complex<f64>]) -> (DVector<Complex<f64>>, DMatrix<Complex<f64>>) {
        assert_eq!(z.len(), self.nvars);
        let pw = self.powers(z);
        let mut values = DVector::zeros(self.m());
        let mut jac = DMatrix::zeros(self.m(), self.nvars);
        for (r, terms) in self.polys.iter().enumerate() {
            for t in terms {
                values[r] += t.vars.iter().fold(t.coeff, |acc, &(v, k)| acc * pw[v][k as usize]);
                for (j, &(vj, kj)) in t.vars.iter().enumerate() {
                    let mut d = t.coeff * kj as f64 * pw[vj][kj as usize - 1];
                    for (i, &(v, k)) in t.vars.iter().enumerate() {
                        if i != j {
                            d *= pw[v][k as usize];
                        }
                    }
                    jac[(r, vj)] += d;
                }
            }
        }
        (values, jac)
    }
}

/// Values, Jacobian and all maximal minors at a point.
#[derive(Debug, Clone, Serialize)]
pub struct JacobianMinors {
    pub values: Vec<[f64; 2]>,
    /// `(column set, determinant as [re, im])` for every `m`-subset of columns.
    pub minors: Vec<(Vec<usize>, [f64; 2])>,
    pub max_value: f64,
    pub max_minor: f64,
    /// On the zero set (all values vanish within [`ZERO_TOL`]).
    pub on_zero_set: bool,
    /// Values and minors all vanish: a singular point of the cut-out set.
    pub singular: bool,
    #[serde(skip)]
    pub jacobian: DMatrix<Complex<f64>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn jacobian_minors(sys: &PolySystem, z: &ProjectivePoint) -> JacobianMinors {
    let num = NumericSystem::new(sys);
    let (values, jacobian) = num.eval_with_jacobian(&z.flat());
    let m = sys.m();
    let minors: Vec<(Vec<usize>, Complex<f64>)> = combinations(num.nvars(), m)
        .into_iter()
        .map(|cols| {
            let sub = DMatrix::from_fn(m, m, |r, c| jacobian[(r, cols[c])]);
            let det = sub.determinant();
            (cols, det)
        })
        .collect();
    let max_value = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_minor = minors.iter().map(|(_, d)| d.norm()).fold(0.0, f64::max);
    JacobianMinors {
        values: values.iter().map(|v| [v.re, v.im]).collect(),
        minors: minors.into_iter().map(|(c, d)| (c, [d.re, d.im])).collect(),
        max_value,
        max_minor,
        on_zero_set: max_value <= ZERO_TOL,
        singular: max_value <= ZERO_TOL && max_minor <= ZERO_TOL,
        jacobian,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete_intersections::parse_system;

    #[test]
    fn k3_points() {
        let sys = parse_system("z0^4 + z1^4 + z2^4 + z2*z3^3", &[3]).unwrap();
        let base = ProjectivePoint::last_basis(&[3]);
        let r = jacobian_minors(&sys, &base);
        assert!(r.on_zero_set && !r.singular);
        let grad: Vec<f64> = (0..4).map(|j| r.jacobian[(0, j)].re).collect();
        assert_eq!(grad, vec![0.0, 0.0, 1.0, 0.0]);
        let off = jacobian_minors(&sys, &ProjectivePoint::basis(&[3], &[0]).unwrap());
        assert_eq!(off.values[0], [1.0, 0.0]);
        assert!(!off.on_zero_set);
    }

    #[test]
    fn double_hyperplane_is_singular() {
        let sys = parse_system("z0^2", &[3]).unwrap();
        assert!(jacobian_minors(&sys, &ProjectivePoint::last_basis(&[3])).singular);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sys = parse_system("z0^3 + 2*z0*z1*z2 - z2^3\nz0*z1 + z2^2", &[3]).unwrap();
        let num = NumericSystem::new(&sys);
        let z: Vec<Complex<f64>> = (0..4).map(|k| Complex::new(0.3 * k as f64 - 0.4, 0.2 + 0.1 * k as f64)).collect();
        let (_, jac) = num.eval_with_jacobian(&z);
        let h = 1e-6;
        for j in 0..4 {
            let mut zp = z.clone();
            zp[j] += h;
            let mut zm = z.clone();
            zm[j] -= h;
            let fd = (num.eval(&zp) - num.eval(&zm)) / Complex::new(2.0 * h, 0.0);
            for r in 0..2 {
                assert!((fd[r] - jac[(r, j)]).norm() < 1e-8);
            }
        }
        assert_eq!(combinations(4, 2).len(), 6);
    }
}
