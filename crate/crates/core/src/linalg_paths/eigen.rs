use nalgebra::{Complex, Schur, SVD};

use super::matrix::{
    imag_part, max_abs, null_space_complex, null_space_real, real_part, to_complex,
};
use super::pair::CommutingPair;
use super::{LinalgError, Result};
use crate::{ComplexMatrix, SquareMatrix};

/// A joint generalized eigenspace of a commuting pair.
///
/// For real labels `basis` spans the space on which `A` and `C` have the
/// single eigenvalues `lambda_a`, `lambda_c`. When either label is non-real
/// the block is a conjugate pair: `complex_basis` spans the complex space for
/// `(lambda_a, lambda_c)` and `basis` spans its real points, which also carry
/// the conjugate labels.
#[derive(Debug, Clone)]
pub struct EigenBlock {
    pub lambda_a: Complex<f64>,
    pub lambda_c: Complex<f64>,
    /// Orthonormal real basis, `n × multiplicity`.
    pub basis: SquareMatrix,
    /// Orthonormal complex basis, `n × multiplicity/2`, for conjugate pairs.
    pub complex_basis: Option<ComplexMatrix>,
}

impl EigenBlock {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_conjugate_pair(&self) -> bool {
        self.complex_basis.is_some()
    }

    /// Both labels real and negative at tolerance `tol`.
    pub fn is_negative_real(&self, tol: f64) -> bool {
        let neg = |z: Complex<f64>| z.im.abs() <= tol && z.re < -tol;
        !self.is_conjugate_pair() && neg(self.lambda_a) && neg(self.lambda_c)
    }
}

/// Common refinement of the generalized eigenspace decompositions.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub n: usize,
    pub cluster_tol: f64,
    pub blocks: Vec<EigenBlock>,
}

impl EigenStructure {
    pub fn total_dimension(&self) -> usize {
        self.blocks.iter().map(EigenBlock::multiplicity).sum()
    }

    /// Negative parity of the decomposition.
    pub fn negative_parity(&self) -> u8 {
        let dim: usize = self
            .blocks
            .iter()
            .filter(|b| b.is_negative_real(self.cluster_tol))
            .map(EigenBlock::multiplicity)
            .sum();
        (dim % 2) as u8
    }
}

const SCHUR_MAX_ITER: usize = 5000;

/// Eigenvalues through a bounded real Schur iteration.
///
/// The unshifted-exception QR sweep can cycle on rare inputs, so a failed
/// attempt is retried on a few fixed orthogonal similarities of `m`, which
/// leave the spectrum unchanged but change the iteration's path.
pub(crate) fn real_eigenvalues(m: &SquareMatrix) -> Result<Vec<Complex<f64>>> {
    let n = m.nrows();
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER) {
        return Ok(s.complex_eigenvalues().iter().copied().collect());
    }
    for attempt in 1..=4 {
        let q = givens_chain(n, 0.37 * attempt as f64);
        let similar = q.transpose() * m * &q;
        if let Some(s) = Schur::try_new(similar, f64::EPSILON, SCHUR_MAX_ITER) {
            return Ok(s.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(LinalgError::Eigenstructure("real Schur iteration did not converge".into()))
}

/// Product of plane rotations by `angle` in the planes `(i, i+1)`.
fn givens_chain(n: usize, angle: f64) -> SquareMatrix {
    let mut q = SquareMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    for i in 0..n.saturating_sub(1) {
        let mut g = SquareMatrix::identity(n, n);
        g[(i, i)] = c;
        g[(i + 1, i + 1)] = c;
        g[(i, i + 1)] = -s;
        g[(i + 1, i)] = s;
        q = q * g;
    }
    q
}

/// Falls back to the Frobenius norm, an upper bound, if Schur fails.
fn spectral_radius(m: &SquareMatrix) -> f64 {
    match real_eigenvalues(m) {
        Ok(eigs) => eigs.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())),
        Err(_) => m.norm(),
    }
}

/// `1e−7` times the larger spectral radius of the pair.
pub fn default_cluster_tol(pair: &CommutingPair) -> f64 {
    let rho = spectral_radius(pair.a()).max(spectral_radius(pair.c()));
    1e-7 * rho.max(f64::MIN_POSITIVE)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Union-find clustering of points whose distance is at most `tol`.
fn cluster(values: &[Complex<f64>], tol: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..values.len()).collect();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; values.len()];
    for i in 0..values.len() {
        let r = find(&mut parent, i);
        match root_slot[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_slot[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Clusters at `tol`, rejecting input whose clustering changes at `tol/2`.
fn stable_clusters(values: &[Complex<f64>], tol: f64) -> Result<Vec<Vec<Complex<f64>>>> {
    let coarse = cluster(values, tol);
    if coarse.len() != cluster(values, tol / 2.0).len() {
        return Err(LinalgError::ClusterAmbiguity { tol });
    }
    let mut out: Vec<Vec<Complex<f64>>> =
        coarse.into_iter().map(|g| g.into_iter().map(|i| values[i]).collect()).collect();
    out.sort_by(|x, y| {
        let (mx, my) = (mean(x), mean(y));
        mx.re.total_cmp(&my.re).then(mx.im.total_cmp(&my.im))
    });
    Ok(out)
}

fn mean(zs: &[Complex<f64>]) -> Complex<f64> {
    zs.iter().sum::<Complex<f64>>() / zs.len() as f64
}

/// `∏ (M − λ_j)/s` over the cluster, with `s` keeping the product bounded.
fn cluster_product(m: &ComplexMatrix, members: &[Complex<f64>]) -> ComplexMatrix {
    let k = m.nrows();
    let scale = Complex::new(
        m.iter().fold(1e-300_f64, |acc, z| acc.max(z.norm())) * k.max(1) as f64,
        0.0,
    );
    let id = ComplexMatrix::identity(k, k);
    let mut prod = id.clone();
    for &lambda in members {
        prod = prod * ((m - &id * lambda) / scale);
    }
    prod
}

enum Restricted {
    Real(SquareMatrix),
    Complex(ComplexMatrix),
}

/// Splits the real matrix `m` (expressed in coordinates where the ambient
/// space is `ℝ^k`) into clusters. Returns (label, real basis or complex basis).
fn split_real(
    m: &SquareMatrix,
    tol: f64,
) -> Result<Vec<(Complex<f64>, Restricted)>> {
    let eigs = real_eigenvalues(m)?;
    let mc = to_complex(m);
    let mut out = Vec::new();
    for members in stable_clusters(&eigs, tol)? {
        let mu = mean(&members);
        let dim = members.len();
        if mu.im.abs() <= tol {
            let k = real_part(&cluster_product(&mc, &members));
            out.push((Complex::new(mu.re, 0.0), Restricted::Real(null_space_real(&k, dim))));
        } else if mu.im > 0.0 {
            let k = cluster_product(&mc, &members);
            out.push((mu, Restricted::Complex(null_space_complex(&k, dim))));
        }
    }
    Ok(out)
}

/// Complex analogue of [`split_real`]; every cluster is kept.
fn split_complex(m: &ComplexMatrix, tol: f64) -> Result<Vec<(Complex<f64>, ComplexMatrix)>> {
    let eigs: Vec<Complex<f64>> = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| LinalgError::Eigenstructure("complex Schur decomposition failed".into()))?
        .iter()
        .copied()
        .collect();
    let mut out = Vec::new();
    for members in stable_clusters(&eigs, tol)? {
        let dim = members.len();
        let k = cluster_product(m, &members);
        out.push((mean(&members), null_space_complex(&k, dim)));
    }
    Ok(out)
}

/// Orthonormal basis of the column span of `m` (assumed full rank).
fn orthonormalize(m: &SquareMatrix) -> SquareMatrix {
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("u requested");
    u.columns(0, m.ncols()).into_owned()
}

/// Pivoted Gram–Schmidt on the projections `P e_i` onto the span of `w`.
///
/// Picks the coordinate direction with the largest remaining projection at
/// each step, so coordinate subspaces come back as the unit vectors in
/// increasing order.
fn canonical_real_basis(w: &SquareMatrix) -> SquareMatrix {
    let (n, k) = (w.nrows(), w.ncols());
    let proj = w * w.transpose();
    let mut out = SquareMatrix::zeros(n, k);
    let mut candidates: Vec<nalgebra::DVector<f64>> =
        (0..n).map(|i| proj.column(i).into_owned()).collect();
    for j in 0..k {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (i, v) in candidates.iter().enumerate() {
            let nv = v.norm();
            if nv > best_norm * (1.0 + 1e-12) + 1e-300 {
                best = i;
                best_norm = nv;
            }
        }
        let q = &candidates[best] / best_norm;
        for v in candidates.iter_mut() {
            let coef = q.dot(v);
            *v -= &q * coef;
        }
        out.set_column(j, &q);
    }
    out
}

fn trace_label_real(m: &SquareMatrix, w: &SquareMatrix) -> Complex<f64> {
    let r = w.transpose() * m * w;
    Complex::new(r.trace() / w.ncols() as f64, 0.0)
}

fn trace_label_complex(m: &SquareMatrix, v: &ComplexMatrix) -> Complex<f64> {
    let r = v.adjoint() * to_complex(m) * v;
    r.trace() / v.ncols() as f64
}

fn complex_block(a: &SquareMatrix, c: &SquareMatrix, v: ComplexMatrix) -> EigenBlock {
    let k = v.ncols();
    let n = v.nrows();
    let mut stacked = SquareMatrix::zeros(n, 2 * k);
    stacked.columns_mut(0, k).copy_from(&real_part(&v));
    stacked.columns_mut(k, k).copy_from(&imag_part(&v));
    EigenBlock {
        lambda_a: trace_label_complex(a, &v),
        lambda_c: trace_label_complex(c, &v),
        basis: orthonormalize(&stacked),
        complex_basis: Some(v),
    }
}

/// Common refinement of the generalized eigenspaces of `A` and `C`.
///
/// Eigenvalues closer than `cluster_tol` share a block.
pub fn common_eigenstructure(pair: &CommutingPair, cluster_tol: f64) -> Result<EigenStructure> {
    if !(cluster_tol > 0.0) {
        return Err(LinalgError::Eigenstructure(format!(
            "cluster tolerance must be positive, got {cluster_tol}"
        )));
    }
    let (a, c) = (pair.a(), pair.c());
    let n = pair.n();
    let residual = super::matrix::commutator_residual(a, c);
    if residual > pair.tol() {
        return Err(LinalgError::NonCommuting { residual, tol: pair.tol() });
    }
    let mut blocks = Vec::new();
    for (_, space) in split_real(a, cluster_tol)? {
        match space {
            Restricted::Real(w) => {
                let cw = w.transpose() * c * &w;
                for (_, sub) in split_real(&cw, cluster_tol)? {
                    match sub {
                        Restricted::Real(nw) => {
                            let basis = canonical_real_basis(&(&w * nw));
                            blocks.push(EigenBlock {
                                lambda_a: trace_label_real(a, &basis),
                                lambda_c: trace_label_real(c, &basis),
                                basis,
                                complex_basis: None,
                            });
                        }
                        Restricted::Complex(nv) => {
                            blocks.push(complex_block(a, c, to_complex(&w) * nv));
                        }
                    }
                }
            }
            Restricted::Complex(u) => {
                let cu = u.adjoint() * to_complex(c) * &u;
                for (_, nv) in split_complex(&cu, cluster_tol)? {
                    blocks.push(complex_block(a, c, &u * nv));
                }
            }
        }
    }
    let structure = EigenStructure { n, cluster_tol, blocks };
    validate(&structure, a, c)?;
    Ok(structure)
}

fn validate(s: &EigenStructure, a: &SquareMatrix, c: &SquareMatrix) -> Result<()> {
    let n = s.n;
    if s.total_dimension() != n {
        return Err(LinalgError::Eigenstructure(format!(
            "block dimensions sum to {} instead of {n}",
            s.total_dimension()
        )));
    }
    let tol_a = 1e-8 * a.norm().max(f64::MIN_POSITIVE);
    let tol_c = 1e-8 * c.norm().max(f64::MIN_POSITIVE);
    let mut all = SquareMatrix::zeros(n, n);
    let mut col = 0;
    for block in &s.blocks {
        let w = &block.basis;
        for (m, tol) in [(a, tol_a), (c, tol_c)] {
            let res = max_abs(&(m * w - w * (w.transpose() * m * w)));
            if res > tol {
                return Err(LinalgError::Eigenstructure(format!(
                    "invariance residual {res:e} exceeds {tol:e}"
                )));
            }
        }
        all.columns_mut(col, w.ncols()).copy_from(w);
        col += w.ncols();
    }
    if n > 0 {
        let sv = SVD::new(all, false, false).singular_values;
        let smallest = sv[n - 1];
        if smallest < 1e-10 {
            return Err(LinalgError::Eigenstructure(format!(
                "blocks are not independent (smallest singular value {smallest:e})"
            )));
        }
    }
    Ok(())
}

/// Parity of the dimension on which both matrices have negative real
/// generalized eigenvalues.
pub fn negative_parity(pair: &CommutingPair) -> Result<u8> {
    let tol = default_cluster_tol(pair);
    Ok(common_eigenstructure(pair, tol)?.negative_parity())
}
