//! The finite-dimensional C*-algebra B = ⊕_i M_{n(i)} carrying a faithful
//! state (or weight) phi = Tr(Q ·), its GNS space L²(B) realised as
//! block-diagonal matrices with Λ(x) = x Q^{1/2}, and the modular toolkit
//! (sigma_z, J, nabla) expressed through the density Q.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    cx, fro_norm, herm_eig, hs_dot, kron, mat_to_vec, orthonormalize_euclidean, vec_to_mat,
    CMatrix, CVector, Tolerance, ONE,
};

/// A block-diagonal matrix, stored one dense block per summand of B.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMat {
    pub blocks: Vec<CMatrix>,
}

impl BlockMat {
    pub fn zeros(sizes: &[usize]) -> Self {
        BlockMat { blocks: sizes.iter().map(|&n| CMatrix::zeros(n, n)).collect() }
    }

    pub fn identity(sizes: &[usize]) -> Self {
        BlockMat { blocks: sizes.iter().map(|&n| CMatrix::identity(n, n)).collect() }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn mul(&self, other: &BlockMat) -> BlockMat {
        BlockMat {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn add(&self, other: &BlockMat) -> BlockMat {
        BlockMat {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &BlockMat) -> BlockMat {
        BlockMat {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> BlockMat {
        BlockMat { blocks: self.blocks.iter().map(|b| b * c).collect() }
    }

    pub fn adjoint(&self) -> BlockMat {
        BlockMat { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.diagonal().sum()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| fro_norm(b).powi(2)).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt pairing Tr(a* b).
    pub fn dot(&self, other: &BlockMat) -> Complex64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| hs_dot(a, b)).sum()
    }

    /// Concatenated row-major entries; coordinates in the matrix-unit basis.
    pub fn flatten(&self) -> CVector {
        let total: usize = self.blocks.iter().map(|b| b.nrows() * b.ncols()).sum();
        let mut out = CVector::zeros(total);
        let mut at = 0;
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out[at] = b[(r, c)];
                    at += 1;
                }
            }
        }
        out
    }

    pub fn unflatten(v: &CVector, sizes: &[usize]) -> BlockMat {
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut at = 0;
        for &n in sizes {
            let mut b = CMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    b[(r, c)] = v[at];
                    at += 1;
                }
            }
            blocks.push(b);
        }
        BlockMat { blocks }
    }
}

struct QBlockEig {
    vals: Vec<f64>,
    u: CMatrix,
}

struct AlgebraInner {
    blocks: Vec<usize>,
    q: BlockMat,
    tol: Tolerance,
    dim: usize,
    q_eig: Vec<QBlockEig>,
    q_half: BlockMat,
    q_neg_half: BlockMat,
    q_quarter: BlockMat,
    q_neg_quarter: BlockMat,
    /// Fixed orthonormal basis of L²(B): Gram-Schmidt of Λ(matrix units) in
    /// block/row/column order.
    basis: Vec<BlockMat>,
    /// Columns are the flattened basis vectors; unitary change from basis
    /// coordinates to matrix-unit coordinates.
    basis_flat: CMatrix,
    /// Matrix units of B in the same lexicographic order.
    units: Vec<BlockMat>,
    /// Block index of each basis/unit position.
    unit_block: Vec<usize>,
    block_offsets: Vec<usize>,
    /// Left-multiplication operators by each matrix unit, in basis coordinates.
    unit_left_ops: Vec<CMatrix>,
    /// Orthonormal basis (HS pairing) of the commutant B' on L²(B).
    commutant: Vec<CMatrix>,
    /// Multiplication map L²⊗L² → L² in basis coordinates (dim x dim²).
    mult: CMatrix,
}

/// Handle to an immutable algebra; cheap to clone and share.
#[derive(Clone)]
pub struct Algebra {
    inner: Arc<AlgebraInner>,
}

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algebra")
            .field("blocks", &self.inner.blocks)
            .field("dim", &self.inner.dim)
            .finish()
    }
}

impl Algebra {
    pub fn new(blocks: &[usize], q: BlockMat, tol: Tolerance) -> Result<Algebra> {
        Self::with_options(blocks, q, tol, false)
    }

    /// Construct with the option of rescaling each block of Q so that
    /// Tr(Q_i^{-1}) = 1 (the conditional-expectation normalisation).
    pub fn with_options(
        blocks: &[usize],
        q: BlockMat,
        tol: Tolerance,
        normalize_q_inverse_trace: bool,
    ) -> Result<Algebra> {
        if blocks.is_empty() {
            return Err(Error::ShapeMismatch("block list is empty".into()));
        }
        if q.blocks.len() != blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "Q has {} blocks, algebra has {}",
                q.blocks.len(),
                blocks.len()
            )));
        }
        for (i, (&n, b)) in blocks.iter().zip(&q.blocks).enumerate() {
            if n == 0 {
                return Err(Error::ShapeMismatch(format!("block {i} has size zero")));
            }
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "Q block {i} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }

        let mut q = q;
        let mut q_eig = Vec::with_capacity(blocks.len());
        for b in &mut q.blocks {
            let (vals, u) = herm_eig(b, &tol)?;
            let min_eig = vals.first().copied().unwrap_or(0.0);
            if min_eig <= tol.rank_tol {
                return Err(Error::NotPositive { min_eig });
            }
            if normalize_q_inverse_trace {
                let c: f64 = vals.iter().map(|v| 1.0 / v).sum();
                *b *= cx(c, 0.0);
                let vals: Vec<f64> = vals.iter().map(|v| v * c).collect();
                q_eig.push(QBlockEig { vals, u });
            } else {
                q_eig.push(QBlockEig { vals, u });
            }
        }

        let dim: usize = blocks.iter().map(|&n| n * n).sum();
        let power = |z: Complex64| -> BlockMat {
            BlockMat {
                blocks: q_eig
                    .iter()
                    .map(|e| {
                        let d = CMatrix::from_diagonal(&CVector::from_vec(
                            e.vals.iter().map(|&l| (z * l.ln()).exp()).collect(),
                        ));
                        &e.u * d * e.u.adjoint()
                    })
                    .collect(),
            }
        };
        let q_half = power(cx(0.5, 0.0));
        let q_neg_half = power(cx(-0.5, 0.0));
        let q_quarter = power(cx(0.25, 0.0));
        let q_neg_quarter = power(cx(-0.25, 0.0));

        // Matrix units and block bookkeeping.
        let mut units = Vec::with_capacity(dim);
        let mut unit_block = Vec::with_capacity(dim);
        let mut block_offsets = Vec::with_capacity(blocks.len());
        let mut offset = 0;
        for (i, &n) in blocks.iter().enumerate() {
            block_offsets.push(offset);
            for k in 0..n {
                for l in 0..n {
                    let mut m = BlockMat::zeros(blocks);
                    m.blocks[i][(k, l)] = ONE;
                    units.push(m);
                    unit_block.push(i);
                }
            }
            offset += n * n;
        }

        // Fixed basis: orthonormalise the GNS images of the units.
        let lam_units: Vec<CVector> =
            units.iter().map(|u| u.mul(&q_half).flatten()).collect();
        let basis_vecs = orthonormalize_euclidean(&lam_units, &tol);
        assert_eq!(basis_vecs.len(), dim, "GNS map must be a linear isomorphism");
        let basis: Vec<BlockMat> =
            basis_vecs.iter().map(|v| BlockMat::unflatten(v, blocks)).collect();
        let mut basis_flat = CMatrix::zeros(dim, dim);
        for (c, v) in basis_vecs.iter().enumerate() {
            basis_flat.set_column(c, v);
        }

        let mut inner = AlgebraInner {
            blocks: blocks.to_vec(),
            q,
            tol,
            dim,
            q_eig,
            q_half,
            q_neg_half,
            q_quarter,
            q_neg_quarter,
            basis,
            basis_flat,
            units,
            unit_block,
            block_offsets,
            unit_left_ops: Vec::new(),
            commutant: Vec::new(),
            mult: CMatrix::zeros(0, 0),
        };

        // Left multiplications by units, in basis coordinates.
        inner.unit_left_ops = (0..dim)
            .map(|p| superop_of(&inner, |v| inner.units[p].mul(v)))
            .collect();

        // Commutant B' = J B J: right multiplications, orthonormalised.
        let right_ops: Vec<CVector> = (0..dim)
            .map(|p| mat_to_vec(&superop_of(&inner, |v| v.mul(&inner.units[p]))))
            .collect();
        inner.commutant = orthonormalize_euclidean(&right_ops, &tol)
            .iter()
            .map(|v| vec_to_mat(v, dim, dim))
            .collect();

        // Multiplication map on GNS coordinates.
        let d_elems: Vec<BlockMat> =
            inner.basis.iter().map(|f| f.mul(&inner.q_neg_half)).collect();
        let mut mult = CMatrix::zeros(dim, dim * dim);
        for p in 0..dim {
            for qi in 0..dim {
                let prod = d_elems[p].mul(&d_elems[qi]).mul(&inner.q_half);
                let coords = coords_of(&inner, &prod);
                for r in 0..dim {
                    mult[(r, p * dim + qi)] = coords[r];
                }
            }
        }
        inner.mult = mult;

        Ok(Algebra { inner: Arc::new(inner) })
    }

    pub fn same_algebra(&self, other: &Algebra) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        self.inner.blocks == other.inner.blocks
            && self
                .inner
                .q
                .sub(&other.inner.q)
                .norm()
                <= self.inner.tol.eq_tol * (1.0 + self.inner.q.norm())
    }

    pub fn blocks(&self) -> &[usize] {
        &self.inner.blocks
    }

    /// Linear dimension of B (and of L²(B)).
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn tol(&self) -> &Tolerance {
        &self.inner.tol
    }

    pub fn q(&self) -> &BlockMat {
        &self.inner.q
    }

    pub fn q_half(&self) -> &BlockMat {
        &self.inner.q_half
    }

    pub fn q_neg_half(&self) -> &BlockMat {
        &self.inner.q_neg_half
    }

    pub fn q_quarter(&self) -> &BlockMat {
        &self.inner.q_quarter
    }

    pub fn q_neg_quarter(&self) -> &BlockMat {
        &self.inner.q_neg_quarter
    }

    /// Q^w for complex w, through the cached eigendecomposition.
    pub fn q_power(&self, w: Complex64) -> BlockMat {
        BlockMat {
            blocks: self
                .inner
                .q_eig
                .iter()
                .map(|e| {
                    let d = CMatrix::from_diagonal(&CVector::from_vec(
                        e.vals.iter().map(|&l| (w * l.ln()).exp()).collect(),
                    ));
                    &e.u * d * e.u.adjoint()
                })
                .collect(),
        }
    }

    pub fn element(&self, mat: BlockMat) -> Result<AlgebraElement> {
        if mat.sizes() != self.inner.blocks {
            return Err(Error::ShapeMismatch("element does not match block structure".into()));
        }
        Ok(AlgebraElement { parent: self.clone(), mat })
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement { parent: self.clone(), mat: BlockMat::identity(&self.inner.blocks) }
    }

    /// phi(x) = Tr(Q x).
    pub fn phi(&self, x: &AlgebraElement) -> Result<Complex64> {
        self.check_parent(&x.parent)?;
        Ok(self.phi_mat(&x.mat))
    }

    pub fn phi_mat(&self, m: &BlockMat) -> Complex64 {
        self.inner.q.mul(m).trace()
    }

    /// GNS map Λ(x) = x Q^{1/2}.
    pub fn lambda(&self, x: &AlgebraElement) -> Result<GnsVector> {
        self.check_parent(&x.parent)?;
        Ok(GnsVector { parent: self.clone(), mat: x.mat.mul(&self.inner.q_half) })
    }

    pub fn lambda_mat(&self, m: &BlockMat) -> BlockMat {
        m.mul(&self.inner.q_half)
    }

    pub fn lambda_inv(&self, v: &GnsVector) -> Result<AlgebraElement> {
        self.check_parent(&v.parent)?;
        Ok(AlgebraElement { parent: self.clone(), mat: v.mat.mul(&self.inner.q_neg_half) })
    }

    pub fn lambda_inv_mat(&self, m: &BlockMat) -> BlockMat {
        m.mul(&self.inner.q_neg_half)
    }

    pub fn gns_vector(&self, mat: BlockMat) -> Result<GnsVector> {
        if mat.sizes() != self.inner.blocks {
            return Err(Error::ShapeMismatch("vector does not match block structure".into()));
        }
        Ok(GnsVector { parent: self.clone(), mat })
    }

    /// GNS inner product (v|w) = Tr(v* w).
    pub fn gns_dot(&self, v: &GnsVector, w: &GnsVector) -> Complex64 {
        v.mat.dot(&w.mat)
    }

    /// Modular automorphism group sigma_z(x) = Q^{iz} x Q^{-iz}.
    pub fn sigma(&self, x: &AlgebraElement, z: Complex64) -> Result<AlgebraElement> {
        self.check_parent(&x.parent)?;
        Ok(AlgebraElement { parent: self.clone(), mat: self.sigma_mat(&x.mat, z) })
    }

    pub fn sigma_mat(&self, m: &BlockMat, z: Complex64) -> BlockMat {
        let i = cx(0.0, 1.0);
        self.q_power(i * z).mul(m).mul(&self.q_power(-i * z))
    }

    /// Modular conjugation: J(x Q^{1/2}) = Q^{1/2} x*, which in the matrix
    /// realisation of L²(B) is plain adjoint.
    pub fn modular_j(&self, v: &GnsVector) -> GnsVector {
        GnsVector { parent: v.parent.clone(), mat: v.mat.adjoint() }
    }

    /// Modular operator power: nabla^s(m) = Q^s m Q^{-s} on L²(B).
    pub fn modular_nabla(&self, v: &GnsVector, s: Complex64) -> GnsVector {
        GnsVector { parent: v.parent.clone(), mat: self.nabla_mat(&v.mat, s) }
    }

    pub fn nabla_mat(&self, m: &BlockMat, s: Complex64) -> BlockMat {
        self.q_power(s).mul(m).mul(&self.q_power(-s))
    }

    /// Fixed orthonormal basis of L²(B).
    pub fn basis(&self) -> &[BlockMat] {
        &self.inner.basis
    }

    /// Matrix units of B in block/row/column order.
    pub fn units(&self) -> &[BlockMat] {
        &self.inner.units
    }

    pub fn unit_index(&self, block: usize, row: usize, col: usize) -> usize {
        self.inner.block_offsets[block] + row * self.inner.blocks[block] + col
    }

    pub fn unit_block(&self, p: usize) -> usize {
        self.inner.unit_block[p]
    }

    pub fn block_offset(&self, block: usize) -> usize {
        self.inner.block_offsets[block]
    }

    /// Coordinates of an L²(B) vector in the fixed basis.
    pub fn coords(&self, v: &BlockMat) -> CVector {
        coords_of(&self.inner, v)
    }

    pub fn from_coords(&self, c: &CVector) -> BlockMat {
        BlockMat::unflatten(&(&self.inner.basis_flat * c), &self.inner.blocks)
    }

    /// Unitary with columns the flattened basis vectors: matrix-unit
    /// coordinates = basis_flat * basis coordinates.
    pub fn basis_flat(&self) -> &CMatrix {
        &self.inner.basis_flat
    }

    /// Matrix (in the fixed basis) of a linear action on L²(B).
    pub fn superop_matrix<F>(&self, f: F) -> CMatrix
    where
        F: Fn(&BlockMat) -> BlockMat,
    {
        superop_of(&self.inner, f)
    }

    pub fn left_mult_matrix(&self, a: &BlockMat) -> CMatrix {
        self.superop_matrix(|v| a.mul(v))
    }

    pub fn right_mult_matrix(&self, a: &BlockMat) -> CMatrix {
        self.superop_matrix(|v| v.mul(a))
    }

    /// Cached left multiplications by matrix units.
    pub fn unit_left_ops(&self) -> &[CMatrix] {
        &self.inner.unit_left_ops
    }

    /// nabla^s as a matrix on L²(B).
    pub fn nabla_matrix(&self, s: Complex64) -> CMatrix {
        let qp = self.q_power(s);
        let qm = self.q_power(-s);
        self.superop_matrix(|v| qp.mul(v).mul(&qm))
    }

    /// Matrix of v ↦ J M(J v) for a given operator matrix M (J is antilinear,
    /// so the sandwich is linear again).
    pub fn j_sandwich(&self, m: &CMatrix) -> CMatrix {
        self.superop_matrix(|v| {
            let jv = v.adjoint();
            let mjv = self.from_coords(&(m * self.coords(&jv)));
            mjv.adjoint()
        })
    }

    /// Orthonormal basis of the commutant B' (right multiplications).
    pub fn commutant_basis(&self) -> &[CMatrix] {
        &self.inner.commutant
    }

    /// Multiplication map m: L²(B)⊗L²(B) → L²(B), with Λ(a)⊗Λ(b) ↦ Λ(ab),
    /// as a dim x dim² matrix; its adjoint; the unit η = Λ(1); and η*.
    pub fn mult_maps(&self) -> (CMatrix, CMatrix, CVector, CMatrix) {
        let m = self.inner.mult.clone();
        let m_star = m.adjoint();
        let eta = self.coords(&self.lambda_mat(&BlockMat::identity(&self.inner.blocks)));
        let eta_star = CMatrix::from_fn(1, self.inner.dim, |_, c| eta[c].conj());
        (m, m_star, eta, eta_star)
    }

    pub fn mult_matrix(&self) -> &CMatrix {
        &self.inner.mult
    }

    pub fn check_parent(&self, other: &Algebra) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }
}

fn coords_of(inner: &AlgebraInner, v: &BlockMat) -> CVector {
    inner.basis_flat.adjoint() * v.flatten()
}

fn superop_of<F>(inner: &AlgebraInner, f: F) -> CMatrix
where
    F: Fn(&BlockMat) -> BlockMat,
{
    let dim = inner.dim;
    let mut out = CMatrix::zeros(dim, dim);
    for q in 0..dim {
        let col = coords_of(inner, &f(&inner.basis[q]));
        out.set_column(q, &col);
    }
    out
}

/// An element of B.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub parent: Algebra,
    pub mat: BlockMat,
}

impl AlgebraElement {
    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement { parent: self.parent.clone(), mat: self.mat.adjoint() }
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.parent.check_parent(&other.parent)?;
        Ok(AlgebraElement { parent: self.parent.clone(), mat: self.mat.mul(&other.mat) })
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.parent.check_parent(&other.parent)?;
        Ok(AlgebraElement { parent: self.parent.clone(), mat: self.mat.add(&other.mat) })
    }

    pub fn scale(&self, c: Complex64) -> AlgebraElement {
        AlgebraElement { parent: self.parent.clone(), mat: self.mat.scale(c) }
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }
}

/// A vector of L²(B) in the matrix realisation.
#[derive(Debug, Clone)]
pub struct GnsVector {
    pub parent: Algebra,
    pub mat: BlockMat,
}

impl GnsVector {
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }
}

/// An element of B ⊗ B^op stored blockwise: component (i,j) is a matrix on
/// C^{n(i)} ⊗ conj(C^{n(j)}), with the op leg represented by transposes.
#[derive(Debug, Clone)]
pub struct TensorElement {
    pub parent: Algebra,
    pub comps: BTreeMap<(usize, usize), CMatrix>,
}

impl TensorElement {
    pub fn zero(parent: &Algebra) -> TensorElement {
        TensorElement { parent: parent.clone(), comps: BTreeMap::new() }
    }

    /// The unit 1 ⊗ 1.
    pub fn one(parent: &Algebra) -> TensorElement {
        let mut comps = BTreeMap::new();
        let blocks = parent.blocks().to_vec();
        for i in 0..blocks.len() {
            for j in 0..blocks.len() {
                let d = blocks[i] * blocks[j];
                comps.insert((i, j), CMatrix::identity(d, d));
            }
        }
        TensorElement { parent: parent.clone(), comps }
    }

    /// Simple tensor b ⊗ c^op.
    pub fn simple(parent: &Algebra, b: &BlockMat, c: &BlockMat) -> TensorElement {
        let mut comps = BTreeMap::new();
        for i in 0..parent.blocks().len() {
            for j in 0..parent.blocks().len() {
                let m = kron(&b.blocks[i], &c.blocks[j].transpose());
                if fro_norm(&m) > 0.0 {
                    comps.insert((i, j), m);
                }
            }
        }
        TensorElement { parent: parent.clone(), comps }
    }

    pub fn comp_dim(&self, i: usize, j: usize) -> usize {
        self.parent.blocks()[i] * self.parent.blocks()[j]
    }

    /// Component (i,j), materialising zeros for absent entries.
    pub fn comp(&self, i: usize, j: usize) -> CMatrix {
        let d = self.comp_dim(i, j);
        self.comps.get(&(i, j)).cloned().unwrap_or_else(|| CMatrix::zeros(d, d))
    }

    pub fn add_to_comp(&mut self, i: usize, j: usize, m: &CMatrix) {
        let d = self.comp_dim(i, j);
        let entry = self.comps.entry((i, j)).or_insert_with(|| CMatrix::zeros(d, d));
        *entry += m;
    }

    pub fn set_comp(&mut self, i: usize, j: usize, m: CMatrix) -> Result<()> {
        let d = self.comp_dim(i, j);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "component ({i},{j}) is {}x{}, expected {d}x{d}",
                m.nrows(),
                m.ncols()
            )));
        }
        self.comps.insert((i, j), m);
        Ok(())
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        self.parent.check_parent(&other.parent)?;
        let mut out = self.clone();
        for (&(i, j), m) in &other.comps {
            out.add_to_comp(i, j, m);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        self.add(&other.scale(cx(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> TensorElement {
        TensorElement {
            parent: self.parent.clone(),
            comps: self.comps.iter().map(|(&k, m)| (k, m * c)).collect(),
        }
    }

    /// Componentwise product (multiplication in B ⊗ B^op).
    pub fn mul(&self, other: &TensorElement) -> Result<TensorElement> {
        self.parent.check_parent(&other.parent)?;
        let mut comps = BTreeMap::new();
        for (&(i, j), a) in &self.comps {
            if let Some(b) = other.comps.get(&(i, j)) {
                comps.insert((i, j), a * b);
            }
        }
        Ok(TensorElement { parent: self.parent.clone(), comps })
    }

    pub fn adjoint(&self) -> TensorElement {
        TensorElement {
            parent: self.parent.clone(),
            comps: self.comps.iter().map(|(&k, m)| (k, m.adjoint())).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.comps.values().map(|m| fro_norm(m).powi(2)).sum::<f64>().sqrt()
    }

    /// Trace over all components (reference trace of B ⊗ B^op).
    pub fn trace(&self) -> Complex64 {
        self.comps.values().map(|m| m.diagonal().sum()).sum()
    }

    /// Residual of the projection axioms e = e* = e².
    pub fn projection_residual(&self) -> f64 {
        let nblocks = self.parent.blocks().len();
        let mut worst: f64 = 0.0;
        for i in 0..nblocks {
            for j in 0..nblocks {
                let m = self.comp(i, j);
                worst = worst.max(fro_norm(&(&m - m.adjoint())));
                worst = worst.max(fro_norm(&(&m * &m - &m)));
            }
        }
        worst
    }

    pub fn is_projection(&self) -> bool {
        self.projection_residual() <= self.parent.tol().eq_tol * (1.0 + self.norm())
    }
}
