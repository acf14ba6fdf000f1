//! Dense complex linear algebra: Hermitian eigendecompositions, fractional
//! powers of positive matrices, orthonormalisation and generated-algebra
//! dimensions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical thresholds used throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Residual threshold for equality checks.
    pub eq_tol: f64,
    /// Threshold for rank decisions (dropping near-zero vectors).
    pub rank_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eq_tol: 1e-9, rank_tol: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, rank_tol: f64) -> Self {
        assert!(eq_tol > 0.0 && rank_tol > 0.0, "tolerances must be positive");
        Tolerance { eq_tol, rank_tol }
    }
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product Tr(a* b), linear in the second slot.
pub fn hs_dot(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    fro_norm(&(m - m.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending, columns
/// of the returned matrix are the matching orthonormal eigenvectors.
pub fn herm_eig(m: &CMatrix, tol: &Tolerance) -> Result<(Vec<f64>, CMatrix)> {
    let residual = hermitian_residual(m);
    if residual > tol.eq_tol * (1.0 + fro_norm(m)) {
        return Err(Error::NotHermitian { residual });
    }
    // Symmetrise before decomposing so tiny asymmetries cannot leak through.
    let h = (m + m.adjoint()).scale(0.5);
    let se = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let n = m.nrows();
    let mut u = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        u.set_column(col, &se.eigenvectors.column(k));
    }
    Ok((vals, u))
}

/// Fractional power of a positive definite matrix, principal branch of
/// lambda^z = exp(z ln lambda) on the (real, positive) spectrum.
pub fn matrix_power(p: &CMatrix, z: Complex64, tol: &Tolerance) -> Result<CMatrix> {
    let (vals, u) = herm_eig(p, tol)?;
    let min_eig = vals.first().copied().unwrap_or(0.0);
    if min_eig <= tol.rank_tol {
        return Err(Error::NotPositive { min_eig });
    }
    let powered: Vec<Complex64> = vals.iter().map(|&l| (z * l.ln()).exp()).collect();
    let d = CMatrix::from_diagonal(&CVector::from_vec(powered));
    Ok(&u * d * u.adjoint())
}

/// Gram-Schmidt with respect to an arbitrary positive sesquilinear form
/// (linear in the second slot).  Vectors that project to (near) zero are
/// dropped, revealing the rank of the input family.
pub fn orthonormalize<F>(vs: &[CVector], ip: F, tol: &Tolerance) -> Vec<CVector>
where
    F: Fn(&CVector, &CVector) -> Complex64,
{
    let max_norm = vs
        .iter()
        .map(|v| ip(v, v).re.max(0.0).sqrt())
        .fold(0.0, f64::max);
    let threshold = tol.rank_tol * max_norm.max(1.0);
    let mut basis: Vec<CVector> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        // Two projection passes for numerical stability.
        for _ in 0..2 {
            for b in &basis {
                let c = ip(b, &w);
                w -= b * c;
            }
        }
        let norm = ip(&w, &w).re.max(0.0).sqrt();
        if norm > threshold {
            w /= Complex64::new(norm, 0.0);
            basis.push(w);
        }
    }
    basis
}

/// Euclidean orthonormalisation of complex vectors.
pub fn orthonormalize_euclidean(vs: &[CVector], tol: &Tolerance) -> Vec<CVector> {
    orthonormalize(vs, |a, b| a.dotc(b), tol)
}

/// Orthonormalise a family of matrices under the Hilbert-Schmidt pairing.
pub fn orthonormalize_matrices(ms: &[CMatrix], tol: &Tolerance) -> Vec<CMatrix> {
    if ms.is_empty() {
        return Vec::new();
    }
    let (r, c) = (ms[0].nrows(), ms[0].ncols());
    let vs: Vec<CVector> = ms.iter().map(mat_to_vec).collect();
    orthonormalize_euclidean(&vs, tol)
        .into_iter()
        .map(|v| vec_to_mat(&v, r, c))
        .collect()
}

/// Flatten a matrix row-major into a vector.
pub fn mat_to_vec(m: &CMatrix) -> CVector {
    let mut out = CVector::zeros(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out[r * m.ncols() + c] = m[(r, c)];
        }
    }
    out
}

/// Inverse of [`mat_to_vec`].
pub fn vec_to_mat(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols, "length mismatch in vec_to_mat");
    CMatrix::from_fn(rows, cols, |r, c| v[r * cols + c])
}

/// Kronecker product with row-major pair indexing: out[(a r),(b s)] = m[(a,b)] n[(r,s)].
pub fn kron(m: &CMatrix, n: &CMatrix) -> CMatrix {
    m.kronecker(n)
}

/// Rank-one operator |u><v| as a matrix (in an orthonormal basis).
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Matrix of X ↦ C X D acting on row-major flattened matrices.
pub fn op_on_hs(c: &CMatrix, d: &CMatrix) -> CMatrix {
    kron(c, &d.transpose())
}

/// Dimension of the smallest unital algebra of d x d matrices containing the
/// generators: grow the span by right products until it stabilises.
pub fn generated_algebra_dim(gens: &[CMatrix], tol: &Tolerance) -> Result<usize> {
    if gens.is_empty() {
        return Err(Error::DimensionMismatch("empty generator list".into()));
    }
    let d = gens[0].nrows();
    for g in gens {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "generator is {}x{}, expected {}x{}",
                g.nrows(),
                g.ncols(),
                d,
                d
            )));
        }
    }
    let mut seed: Vec<CMatrix> = vec![CMatrix::identity(d, d)];
    seed.extend_from_slice(gens);
    let mut basis = orthonormalize_matrices(&seed, tol);
    loop {
        let mut grew = false;
        let current = basis.clone();
        for x in &current {
            for g in gens {
                let prod = x * g;
                let mut w = mat_to_vec(&prod);
                for _ in 0..2 {
                    for b in &basis {
                        let c = mat_to_vec(b).dotc(&w);
                        w -= mat_to_vec(b).map(|z| z * c);
                    }
                }
                let norm = w.norm();
                if norm > tol.rank_tol {
                    basis.push(vec_to_mat(&(w / cx(norm, 0.0)), d, d));
                    grew = true;
                }
            }
        }
        if !grew || basis.len() >= d * d {
            break;
        }
    }
    Ok(basis.len().min(d * d))
}

/// Orthonormal basis of the column space of `m` (directions with singular
/// value above the rank threshold), through the rows-side Gram matrix.
pub fn column_space_basis(m: &CMatrix, tol: &Tolerance) -> Vec<CVector> {
    if m.is_empty() {
        return Vec::new();
    }
    let gram = m * m.adjoint();
    let (vals, u) = herm_eig(&gram, tol).expect("Gram matrix is Hermitian");
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    // Spectra here are cleanly split between O(1) directions and numerical
    // zeros, so the rank cut is taken on the Gram eigenvalues directly.
    let cutoff = tol.rank_tol * lmax.max(1.0);
    let mut cols = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        if v > cutoff {
            cols.push(u.column(k).into_owned());
        }
    }
    cols
}

/// Orthonormal basis of the kernel of `m`, through the columns-side Gram
/// matrix.
pub fn kernel_basis(m: &CMatrix, tol: &Tolerance) -> Vec<CVector> {
    if m.is_empty() {
        return Vec::new();
    }
    kernel_basis_of_gram(&(m.adjoint() * m), tol)
}

/// Kernel directions of a positive semidefinite Gram matrix.
pub fn kernel_basis_of_gram(gram: &CMatrix, tol: &Tolerance) -> Vec<CVector> {
    let (vals, u) = herm_eig(gram, tol).expect("Gram matrix is Hermitian");
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol.rank_tol * lmax.max(1.0);
    let mut out = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        if v <= cutoff {
            out.push(u.column(k).into_owned());
        }
    }
    out
}

/// Minimum eigenvalue of the Hermitian part of `m`.
pub fn min_herm_eig(m: &CMatrix, tol: &Tolerance) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    let (vals, _) = herm_eig(&h, tol).expect("symmetrised matrix is Hermitian");
    vals.first().copied().unwrap_or(0.0)
}
