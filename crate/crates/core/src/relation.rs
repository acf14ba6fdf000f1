//! Projections e ∈ B ⊗ B^op as invariant subspaces V ⊆ L²(B) ⊗ conj(L²(B)),
//! their block decomposition over pairs of summands, degree/integrability,
//! weighted-orthogonal Kraus families, and the normal form with symmetric
//! density factors.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement, BlockMat, TensorElement};
use crate::error::{Error, Result};
use crate::graph::{projection_range, OperatorSubspace, SuperOperator};
use crate::linalg::{
    column_space_basis, cx, fro_norm, mat_to_vec, op_norm, op_on_hs, orthonormalize_euclidean,
    outer, vec_to_mat, CMatrix, CVector, ONE,
};

/// Matrix of the action of e ∈ B ⊗ B^op on the Hilbert-Schmidt space of
/// L²(B): X ↦ Σ b X c over the matrix-unit expansion of the components.
pub fn tensor_action_matrix(e: &TensorElement) -> CMatrix {
    let alg = &e.parent;
    let d2 = alg.dim() * alg.dim();
    let blocks = alg.blocks();
    let mut out = CMatrix::zeros(d2, d2);
    for (&(i, j), comp) in &e.comps {
        let (ni, nj) = (blocks[i], blocks[j]);
        for k in 0..ni {
            for l in 0..ni {
                let left = &alg.unit_left_ops()[alg.unit_index(i, k, l)];
                for s in 0..nj {
                    for t in 0..nj {
                        let c = comp[(k * nj + s, l * nj + t)];
                        if c.norm() == 0.0 {
                            continue;
                        }
                        let right = &alg.unit_left_ops()[alg.unit_index(j, t, s)];
                        out += op_on_hs(left, right) * c;
                    }
                }
            }
        }
    }
    out
}

/// A subspace of L²(B) ⊗ conj(L²(B)), stored as operators on L²(B) with the
/// Hilbert-Schmidt pairing.
#[derive(Debug, Clone)]
pub struct HsSubspace {
    pub parent: Algebra,
    pub basis: Vec<CMatrix>,
    pub projection: CMatrix,
    invariance: std::sync::OnceLock<f64>,
}

impl HsSubspace {
    pub fn from_vectors(parent: &Algebra, mats: &[CMatrix]) -> Self {
        let d = parent.dim();
        let vecs: Vec<CVector> = mats.iter().map(mat_to_vec).collect();
        let basis_vecs = orthonormalize_euclidean(&vecs, parent.tol());
        let mut projection = CMatrix::zeros(d * d, d * d);
        for v in &basis_vecs {
            projection += outer(v, v);
        }
        HsSubspace {
            parent: parent.clone(),
            basis: basis_vecs.iter().map(|v| vec_to_mat(v, d, d)).collect(),
            projection,
            invariance: std::sync::OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Invariance defect under the commutant bimodule action.  The action
    /// generators c' ⊗ 1 and 1 ⊗ d' span a *-closed family, so the projection
    /// commutes with every c' ⊗ d' exactly when the basis stays inside the
    /// subspace under one-sided multiplication; the residual measures that.
    pub fn invariance_residual(&self) -> f64 {
        *self.invariance.get_or_init(|| {
            let mut worst: f64 = 0.0;
            for x in &self.basis {
                for c in self.parent.commutant_basis() {
                    for y in [c * x, x * c] {
                        let v = mat_to_vec(&y);
                        let r = (&v - &self.projection * &v).norm();
                        worst = worst.max(r);
                    }
                }
            }
            worst
        })
    }

    pub fn is_invariant(&self) -> bool {
        self.invariance_residual() <= self.parent.tol().eq_tol * (1.0 + self.dim() as f64)
    }

    fn require_invariant(&self) -> Result<()> {
        let residual = self.invariance_residual();
        if residual > self.parent.tol().eq_tol * (1.0 + self.dim() as f64) {
            Err(Error::NotInvariant { residual })
        } else {
            Ok(())
        }
    }

    pub fn membership_residual(&self, x: &CMatrix) -> f64 {
        let v = mat_to_vec(x);
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        (&v - &self.projection * &v).norm() / n
    }

    pub fn distance(&self, other: &HsSubspace) -> f64 {
        fro_norm(&(&self.projection - &other.projection))
    }

    /// Basis of V restricted to the (i,j) block pair, realigned so that the
    /// left legs appear as rectangular matrices: the spaces V⁰_{i,j}.
    pub fn block_decompose(&self) -> Result<BlockFamily> {
        self.require_invariant()?;
        Ok(self.block_v0())
    }

    fn block_v0(&self) -> BlockFamily {
        let alg = &self.parent;
        let blocks = alg.blocks();
        let u = alg.basis_flat();
        let mut family: BTreeMap<(usize, usize), Vec<CMatrix>> = BTreeMap::new();
        for i in 0..blocks.len() {
            for j in 0..blocks.len() {
                let (ni, nj) = (blocks[i], blocks[j]);
                let (oi, oj) = (alg.block_offset(i), alg.block_offset(j));
                // Columns of the realigned block over all basis vectors.
                let mut cols: Vec<CVector> = Vec::new();
                for x in &self.basis {
                    let xe = u * x * u.adjoint();
                    for l in 0..ni {
                        for t in 0..nj {
                            let mut col = CVector::zeros(ni * nj);
                            for k in 0..ni {
                                for s in 0..nj {
                                    col[k * nj + s] = xe[(oi + k * ni + l, oj + s * nj + t)];
                                }
                            }
                            cols.push(col);
                        }
                    }
                }
                if cols.is_empty() {
                    family.insert((i, j), Vec::new());
                    continue;
                }
                let mut m = CMatrix::zeros(ni * nj, cols.len());
                for (c, v) in cols.iter().enumerate() {
                    m.set_column(c, v);
                }
                let basis = column_space_basis(&m, alg.tol())
                    .iter()
                    .map(|v| vec_to_mat(v, ni, nj))
                    .collect();
                family.insert((i, j), basis);
            }
        }
        BlockFamily { parent: alg.clone(), comps: family }
    }

    /// Rebuild the projection from the block family; the residual against the
    /// stored projection measures invariance failure.
    pub fn reassembly_residual(&self) -> f64 {
        let rebuilt = self.block_v0().span_projection();
        fro_norm(&(&self.projection - &rebuilt.projection))
    }

    /// The projection e ∈ B ⊗ B^op whose image is this subspace.
    pub fn to_tensor_element(&self) -> Result<TensorElement> {
        self.require_invariant()?;
        let family = self.block_v0();
        let mut e = TensorElement::zero(&self.parent);
        for (&(i, j), ws) in &family.comps {
            let d = e.comp_dim(i, j);
            let mut p = CMatrix::zeros(d, d);
            for w in ws {
                let v = mat_to_vec(w);
                p += outer(&v, &v);
            }
            if fro_norm(&p) > 0.0 {
                e.set_comp(i, j, p)?;
            }
        }
        Ok(e)
    }

    /// Operators X with X c' nabla^{-1/2} ∈ V for every commutant element c';
    /// the bimodule S in its Hilbert-module description.
    pub fn to_operator_subspace(&self) -> Result<OperatorSubspace> {
        self.require_invariant()?;
        let alg = &self.parent;
        let d = alg.dim();
        let d2 = d * d;
        let nh = alg.nabla_matrix(cx(-0.5, 0.0));
        let blocker = CMatrix::identity(d2, d2) - &self.projection;
        // Gram of the stacked constraints (1-P) ∘ (· c' nabla^{-1/2}); its
        // kernel is S.
        let mut gram = CMatrix::zeros(d2, d2);
        for c in alg.commutant_basis() {
            let k = op_on_hs(&CMatrix::identity(d, d), &(c * &nh));
            let bk = &blocker * k;
            gram += bk.adjoint() * bk;
        }
        let kernel = crate::linalg::kernel_basis_of_gram(&gram, alg.tol());
        let mats: Vec<CMatrix> = kernel.iter().map(|v| vec_to_mat(v, d, d)).collect();
        Ok(OperatorSubspace::from_span(alg, &mats))
    }
}

/// Image of a projection in B ⊗ B^op acting on L²(B) ⊗ conj(L²(B)).
pub fn image_v(e: &TensorElement) -> Result<HsSubspace> {
    let residual = e.projection_residual();
    if residual > e.parent.tol().eq_tol * (1.0 + e.norm()) {
        return Err(Error::NotProjection { residual });
    }
    let alg = &e.parent;
    let p = tensor_action_matrix(e);
    let d = alg.dim();
    let range = projection_range(&p, alg)?;
    let basis = range.iter().map(|v| vec_to_mat(v, d, d)).collect::<Vec<_>>();
    Ok(HsSubspace::from_vectors(alg, &basis))
}

/// Degree of a tensor element: (id ⊗ phi^op)(e) with its operator norm.
pub fn degree(e: &TensorElement) -> (AlgebraElement, f64) {
    let alg = &e.parent;
    let blocks = alg.blocks();
    let mut out = BlockMat::zeros(blocks);
    for (&(i, j), comp) in &e.comps {
        let (ni, nj) = (blocks[i], blocks[j]);
        let qj = &alg.q().blocks[j];
        for a in 0..ni {
            for b in 0..ni {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..nj {
                    for s in 0..nj {
                        acc += comp[(a * nj + t, b * nj + s)] * qj[(t, s)];
                    }
                }
                out.blocks[i][(a, b)] += acc;
            }
        }
    }
    let norm = out.blocks.iter().map(op_norm).fold(0.0, f64::max);
    (AlgebraElement { parent: alg.clone(), mat: out }, norm)
}

/// The slice (id ⊗ phi^op) applied to an operator on L²(B) ⊗ conj(L²(B))
/// whose conjugate leg lies in the transposed algebra.
pub fn partial_phi_op(alg: &Algebra, t: &CMatrix) -> CMatrix {
    let d = alg.dim();
    assert_eq!(t.nrows(), d * d, "expected an operator on the HS space");
    let lam1 = alg.lambda_mat(&BlockMat::identity(alg.blocks()));
    let lam1_coords = alg.coords(&lam1);
    let mut out = CMatrix::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            // Slice of the conjugate leg at (p,q); its transpose is the
            // matrix of left multiplication by the sliced algebra element.
            let c = CMatrix::from_fn(d, d, |r, u| t[(p * d + r, q * d + u)]);
            let m_lam1 = alg.from_coords(&(c.transpose() * &lam1_coords));
            let m = alg.lambda_inv_mat(&m_lam1);
            out[(p, q)] = alg.phi_mat(&m);
        }
    }
    out
}

/// Rectangular matrices assigned to pairs of blocks.
#[derive(Debug, Clone)]
pub struct BlockFamily {
    pub parent: Algebra,
    pub comps: BTreeMap<(usize, usize), Vec<CMatrix>>,
}

impl BlockFamily {
    pub fn total(&self) -> usize {
        self.comps.values().map(|v| v.len()).sum()
    }

    /// Projection (on the HS space of L²(B)) onto the bimodule spanned by
    /// these left legs with arbitrary conjugate legs.
    pub fn span_projection(&self) -> HsSubspace {
        let alg = &self.parent;
        let blocks = alg.blocks();
        let u = alg.basis_flat();
        let d = alg.dim();
        let mut mats: Vec<CMatrix> = Vec::new();
        for (&(i, j), ws) in &self.comps {
            let (ni, nj) = (blocks[i], blocks[j]);
            let (oi, oj) = (alg.block_offset(i), alg.block_offset(j));
            for w in ws {
                for l in 0..ni {
                    for t in 0..nj {
                        // Conjugate-leg matrix unit at (l,t).
                        let mut xe = CMatrix::zeros(d, d);
                        for k in 0..ni {
                            for s in 0..nj {
                                xe[(oi + k * ni + l, oj + s * nj + t)] = w[(k, s)];
                            }
                        }
                        mats.push(u.adjoint() * xe * u);
                    }
                }
            }
        }
        HsSubspace::from_vectors(alg, &mats)
    }
}

/// Per block pair, a basis of S⁰_{i,j} = V⁰_{i,j} Q_j^{1/2} orthonormal for
/// the weighted pairing Tr(Q_j^{-1} β* γ).
pub fn orthogonal_kraus_basis(v: &HsSubspace) -> Result<BlockFamily> {
    let family = v.block_decompose()?;
    let alg = &v.parent;
    let q_half = alg.q_half();
    let q_inv = alg.q_power(cx(-1.0, 0.0));
    let mut comps = BTreeMap::new();
    for (&(i, j), ws) in &family.comps {
        let qj_half = &q_half.blocks[j];
        let qj_inv = &q_inv.blocks[j];
        let candidates: Vec<CMatrix> = ws.iter().map(|w| w * qj_half).collect();
        let betas = orthonormalize_weighted(&candidates, qj_inv, alg);
        comps.insert((i, j), betas);
    }
    Ok(BlockFamily { parent: alg.clone(), comps })
}

fn orthonormalize_weighted(mats: &[CMatrix], weight: &CMatrix, alg: &Algebra) -> Vec<CMatrix> {
    // Gram-Schmidt under <a,b> = Tr(weight a* b).
    let ip = |a: &CMatrix, b: &CMatrix| (weight * a.adjoint() * b).diagonal().sum();
    let mut basis: Vec<CMatrix> = Vec::new();
    let max_norm = mats
        .iter()
        .map(|m| ip(m, m).re.max(0.0).sqrt())
        .fold(0.0, f64::max);
    let threshold = alg.tol().rank_tol * max_norm.max(1.0);
    for m in mats {
        let mut w = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = ip(b, &w);
                w -= b * c;
            }
        }
        let norm = ip(&w, &w).re.max(0.0).sqrt();
        if norm > threshold {
            basis.push(w / cx(norm, 0.0));
        }
    }
    basis
}

/// Gram residual of a Kraus family under the weighted pairing.
pub fn kraus_gram_residual(k: &BlockFamily) -> f64 {
    let alg = &k.parent;
    let q_inv = alg.q_power(cx(-1.0, 0.0));
    let mut worst: f64 = 0.0;
    for (&(_, j), betas) in &k.comps {
        let qj_inv = &q_inv.blocks[j];
        for (a, x) in betas.iter().enumerate() {
            for (b, y) in betas.iter().enumerate() {
                let g = (qj_inv * x.adjoint() * y).diagonal().sum();
                let expect = if a == b { ONE } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((g - expect).norm());
            }
        }
    }
    worst
}

/// The completely positive map x ↦ Σ_{i,k} β_k x β_k* lifted to L²(B).
pub fn kraus_adjacency(k: &BlockFamily) -> Result<SuperOperator> {
    let alg = &k.parent;
    let blocks = alg.blocks().to_vec();
    for (&(i, j), betas) in &k.comps {
        for b in betas {
            if b.nrows() != blocks[i] || b.ncols() != blocks[j] {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus factor for pair ({i},{j}) is {}x{}, expected {}x{}",
                    b.nrows(),
                    b.ncols(),
                    blocks[i],
                    blocks[j]
                )));
            }
        }
    }
    let comps = k.comps.clone();
    Ok(SuperOperator::from_hom_action(alg, move |m| {
        let mut out = BlockMat::zeros(&blocks);
        for (&(i, j), betas) in &comps {
            for b in betas {
                out.blocks[i] += b * &m.blocks[j] * b.adjoint();
            }
        }
        out
    }))
}

/// Normal form X = Q_i^{1/4} β Q_j^{-1/4} with its verification residuals.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub family: BlockFamily,
    pub gram_residual: f64,
    pub adjacency_residual: f64,
}

/// The symmetric normal form of an orthogonal Kraus family, with the Gram
/// identity Tr(X_k* Q_i^{-1/2} X_l Q_j^{-1/2}) = δ_{kl} and the adjacency
/// reproduction both verified.
pub fn wasilewski_normal_form(k: &BlockFamily) -> Result<NormalForm> {
    let alg = &k.parent;
    let input_gram = kraus_gram_residual(k);
    if input_gram > alg.tol().eq_tol * 100.0 {
        return Err(Error::GramNotIdentity { residual: input_gram });
    }
    let q_quarter = alg.q_quarter();
    let q_neg_quarter = alg.q_neg_quarter();
    let q_neg_half = alg.q_neg_half();
    let mut comps = BTreeMap::new();
    let mut gram_residual: f64 = 0.0;
    for (&(i, j), betas) in &k.comps {
        let xs: Vec<CMatrix> = betas
            .iter()
            .map(|b| &q_quarter.blocks[i] * b * &q_neg_quarter.blocks[j])
            .collect();
        for (a, x) in xs.iter().enumerate() {
            for (b, y) in xs.iter().enumerate() {
                let g = (x.adjoint() * &q_neg_half.blocks[i] * y * &q_neg_half.blocks[j])
                    .diagonal()
                    .sum();
                let expect = if a == b { ONE } else { Complex64::new(0.0, 0.0) };
                gram_residual = gram_residual.max((g - expect).norm());
            }
        }
        comps.insert((i, j), xs);
    }
    let family = BlockFamily { parent: alg.clone(), comps };
    if gram_residual > alg.tol().eq_tol * 100.0 {
        return Err(Error::GramNotIdentity { residual: gram_residual });
    }

    // A(x) = Σ Q_i^{-1/4} X_k Q_j^{1/4} x Q_j^{1/4} X_k* Q_i^{-1/4} must
    // reproduce the adjacency operator of the original family.
    let blocks = alg.blocks().to_vec();
    let comps = family.comps.clone();
    let qq = q_quarter.clone();
    let qnq = q_neg_quarter.clone();
    let rebuilt = SuperOperator::from_hom_action(alg, move |m| {
        let mut out = BlockMat::zeros(&blocks);
        for (&(i, j), xs) in &comps {
            for x in xs {
                let left = &qnq.blocks[i] * x * &qq.blocks[j];
                out.blocks[i] += &left * &m.blocks[j] * left.adjoint();
            }
        }
        out
    });
    let original = kraus_adjacency(k)?;
    let adjacency_residual = fro_norm(&(&rebuilt.matrix - &original.matrix));
    Ok(NormalForm { family, gram_residual, adjacency_residual })
}

/// The module map sending the commutant coordinate of b to α J b J nabla^{-1/2},
/// as a (dim² x dim) matrix; columns are images of the fixed basis of L²(B).
pub fn hat_module_map(alpha: &SuperOperator) -> CMatrix {
    let alg = &alpha.parent;
    let d = alg.dim();
    let nh = alg.nabla_matrix(cx(-0.5, 0.0));
    let mut out = CMatrix::zeros(d * d, d);
    for p in 0..d {
        // v = basis_p corresponds to a = Λ^{-1}(J v); J a J is right
        // multiplication by a*.
        let v = &alg.basis()[p];
        let a = alg.lambda_inv_mat(&v.adjoint());
        let r = alg.right_mult_matrix(&a.adjoint());
        let img = &alpha.matrix * r * &nh;
        out.set_column(p, &mat_to_vec(&img));
    }
    out
}
