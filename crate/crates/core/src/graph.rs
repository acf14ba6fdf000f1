//! Quantum adjacency operators on L²(B): the Schur product and its
//! idempotents, the bijection with projections in B ⊗ B^op, the commutant
//! bimodule S with its twists, KMS adjoints, the tensor swap, and the
//! Hilbert-space forms of the swapped operator.

use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement, BlockMat, GnsVector, TensorElement};
use crate::error::{Error, Result};
use crate::linalg::{
    cx, fro_norm, herm_eig, kron, mat_to_vec, min_herm_eig, orthonormalize_euclidean, outer,
    vec_to_mat, CMatrix, CVector, ONE,
};

/// A linear operator on L²(B), stored as its matrix in the fixed basis.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    pub parent: Algebra,
    pub matrix: CMatrix,
}

impl SuperOperator {
    pub fn new(parent: Algebra, matrix: CMatrix) -> Result<Self> {
        let d = parent.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "superoperator is {}x{}, expected {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(SuperOperator { parent, matrix })
    }

    pub fn identity(parent: &Algebra) -> Self {
        let d = parent.dim();
        SuperOperator { parent: parent.clone(), matrix: CMatrix::identity(d, d) }
    }

    pub fn zero(parent: &Algebra) -> Self {
        let d = parent.dim();
        SuperOperator { parent: parent.clone(), matrix: CMatrix::zeros(d, d) }
    }

    pub fn from_action<F>(parent: &Algebra, f: F) -> Self
    where
        F: Fn(&BlockMat) -> BlockMat,
    {
        SuperOperator { parent: parent.clone(), matrix: parent.superop_matrix(f) }
    }

    /// Lift a map on B to L²(B) through the GNS map.
    pub fn from_hom_action<F>(parent: &Algebra, f: F) -> Self
    where
        F: Fn(&BlockMat) -> BlockMat,
    {
        SuperOperator {
            parent: parent.clone(),
            matrix: parent.superop_matrix(|v| parent.lambda_mat(&f(&parent.lambda_inv_mat(v)))),
        }
    }

    /// Rank-one operator |ket><bra|.
    pub fn rank_one(ket: &GnsVector, bra: &GnsVector) -> Result<Self> {
        ket.parent.check_parent(&bra.parent)?;
        let parent = ket.parent.clone();
        let u = parent.coords(&ket.mat);
        let v = parent.coords(&bra.mat);
        Ok(SuperOperator { parent, matrix: outer(&u, &v) })
    }

    pub fn apply(&self, v: &GnsVector) -> Result<GnsVector> {
        self.parent.check_parent(&v.parent)?;
        let coords = &self.matrix * self.parent.coords(&v.mat);
        Ok(GnsVector { parent: self.parent.clone(), mat: self.parent.from_coords(&coords) })
    }

    /// The associated map B → B through the GNS identification.
    pub fn apply_element(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.parent.check_parent(&x.parent)?;
        let out = self.apply_hom_mat(&x.mat);
        Ok(AlgebraElement { parent: self.parent.clone(), mat: out })
    }

    pub fn apply_hom_mat(&self, m: &BlockMat) -> BlockMat {
        let v = self.parent.lambda_mat(m);
        let coords = &self.matrix * self.parent.coords(&v);
        self.parent.lambda_inv_mat(&self.parent.from_coords(&coords))
    }

    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.parent.check_parent(&other.parent)?;
        Ok(SuperOperator { parent: self.parent.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.parent.check_parent(&other.parent)?;
        Ok(SuperOperator { parent: self.parent.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.parent.check_parent(&other.parent)?;
        Ok(SuperOperator { parent: self.parent.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, c: Complex64) -> SuperOperator {
        SuperOperator { parent: self.parent.clone(), matrix: &self.matrix * c }
    }

    /// Hilbert adjoint for the GNS inner product.
    pub fn adjoint(&self) -> SuperOperator {
        SuperOperator { parent: self.parent.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn norm(&self) -> f64 {
        fro_norm(&self.matrix)
    }

    /// Schur product m (A ⊗ B) m*.
    pub fn schur_product(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.parent.check_parent(&other.parent)?;
        let m = self.parent.mult_matrix();
        let big = kron(&self.matrix, &other.matrix);
        Ok(SuperOperator { parent: self.parent.clone(), matrix: m * big * m.adjoint() })
    }

    /// Residual of the reflexivity axiom m (A ⊗ 1) m* = 1.
    pub fn reflexivity_residual(&self) -> f64 {
        let d = self.parent.dim();
        let m = self.parent.mult_matrix();
        let big = kron(&self.matrix, &CMatrix::identity(d, d));
        fro_norm(&(m * big * m.adjoint() - CMatrix::identity(d, d)))
    }

    /// Rank decomposition A = Σ_j |Λ(b_j)><Λ(a_j)| via the singular value
    /// decomposition; singular values below the rank threshold are dropped.
    pub fn rank_decomposition(&self) -> Vec<(BlockMat, BlockMat)> {
        let svd = self.matrix.clone().svd(true, true);
        let u = svd.u.as_ref().expect("svd");
        let vt = svd.v_t.as_ref().expect("svd");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cutoff = self.parent.tol().rank_tol * smax.max(1.0);
        let mut terms = Vec::new();
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff {
                continue;
            }
            let ket = u.column(k) * cx(s, 0.0);
            let bra = vt.row(k).adjoint();
            let b = self.parent.lambda_inv_mat(&self.parent.from_coords(&ket.clone_owned()));
            let a = self.parent.lambda_inv_mat(&self.parent.from_coords(&bra));
            terms.push((b, a));
        }
        terms
    }

    /// θ_A(T) = Σ_j b_j T a_j* with A = Σ_j |Λ(b_j)><Λ(a_j)|; the result does
    /// not depend on the chosen rank decomposition.
    pub fn theta_apply(&self, t: &SuperOperator) -> Result<SuperOperator> {
        self.parent.check_parent(&t.parent)?;
        let d = self.parent.dim();
        let mut out = CMatrix::zeros(d, d);
        for (b, a) in self.rank_decomposition() {
            let lb = self.parent.left_mult_matrix(&b);
            let la = self.parent.left_mult_matrix(&a);
            out += lb * &t.matrix * la.adjoint();
        }
        Ok(SuperOperator { parent: self.parent.clone(), matrix: out })
    }

    /// Ψ'(A) ∈ B ⊗ B^op with |Λ(b)><Λ(a)| ↦ b ⊗ (sigma_{i/2}(a)*)^op.
    pub fn psi_prime(&self) -> TensorElement {
        let alg = &self.parent;
        let dim = alg.dim();
        // d_p = Λ^{-1}(basis_p) and the twisted bra-side elements.
        let d_elems: Vec<BlockMat> = alg.basis().iter().map(|f| alg.lambda_inv_mat(f)).collect();
        let g_elems: Vec<BlockMat> = d_elems
            .iter()
            .map(|d| alg.sigma_mat(d, cx(0.0, 0.5)).adjoint())
            .collect();
        let nblocks = alg.blocks().len();
        let mut e = TensorElement::zero(alg);
        for p in 0..dim {
            for q in 0..dim {
                let coeff = self.matrix[(p, q)];
                if coeff.norm() == 0.0 {
                    continue;
                }
                for i in 0..nblocks {
                    if fro_norm(&d_elems[p].blocks[i]) == 0.0 {
                        continue;
                    }
                    for j in 0..nblocks {
                        if fro_norm(&g_elems[q].blocks[j]) == 0.0 {
                            continue;
                        }
                        let term = kron(&d_elems[p].blocks[i], &g_elems[q].blocks[j].transpose());
                        e.add_to_comp(i, j, &(term * coeff));
                    }
                }
            }
        }
        e
    }

    /// Inverse of Ψ': on simple tensors b ⊗ c^op the adjacency operator is
    /// |Λ(b)><Λ(sigma_{-i/2}(c*))|, extended linearly through the matrix-unit
    /// expansion of the components.
    pub fn psi_prime_inv(e: &TensorElement) -> SuperOperator {
        let alg = &e.parent;
        let dim = alg.dim();
        let blocks = alg.blocks();
        // Kets Λ(E_kl) and bras Λ(sigma_{-i/2}(E_st)) for every matrix unit.
        let kets: Vec<CVector> =
            alg.units().iter().map(|u| alg.coords(&alg.lambda_mat(u))).collect();
        let bras: Vec<CVector> = alg
            .units()
            .iter()
            .map(|u| alg.coords(&alg.lambda_mat(&alg.sigma_mat(u, cx(0.0, -0.5)))))
            .collect();
        let mut out = CMatrix::zeros(dim, dim);
        for (&(i, j), comp) in &e.comps {
            let (ni, nj) = (blocks[i], blocks[j]);
            for k in 0..ni {
                for l in 0..ni {
                    for s in 0..nj {
                        for t in 0..nj {
                            let c = comp[(k * nj + s, l * nj + t)];
                            if c.norm() == 0.0 {
                                continue;
                            }
                            let ket = &kets[alg.unit_index(i, k, l)];
                            let bra = &bras[alg.unit_index(j, s, t)];
                            out += outer(ket, bra) * c;
                        }
                    }
                }
            }
        }
        SuperOperator { parent: alg.clone(), matrix: out }
    }

    /// KMS adjoint nabla^{-1/2} A* nabla^{1/2}.
    pub fn kms_adjoint(&self) -> SuperOperator {
        let np = self.parent.nabla_matrix(cx(0.5, 0.0));
        let nm = self.parent.nabla_matrix(cx(-0.5, 0.0));
        SuperOperator { parent: self.parent.clone(), matrix: nm * self.matrix.adjoint() * np }
    }

    /// Residual of realness: A(x*) = A(x)* as a map on B, checked on units.
    pub fn realness_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for u in self.parent.units() {
            let lhs = self.apply_hom_mat(&u.adjoint());
            let rhs = self.apply_hom_mat(u).adjoint();
            worst = worst.max(lhs.sub(&rhs).norm());
        }
        worst
    }

    /// Blockwise Choi matrices of the associated map B → B; complete
    /// positivity holds when every one is positive semidefinite.
    pub fn choi_blocks(&self) -> Vec<CMatrix> {
        let alg = &self.parent;
        let blocks = alg.blocks();
        let mut out = Vec::new();
        for j in 0..blocks.len() {
            let nj = blocks[j];
            // Images of the block-j matrix units under the map.
            let images: Vec<BlockMat> = (0..nj * nj)
                .map(|p| {
                    let unit = &alg.units()[alg.block_offset(j) + p];
                    self.apply_hom_mat(unit)
                })
                .collect();
            for i in 0..blocks.len() {
                let ni = blocks[i];
                let mut choi = CMatrix::zeros(nj * ni, nj * ni);
                for k in 0..nj {
                    for l in 0..nj {
                        let mut unit = CMatrix::zeros(nj, nj);
                        unit[(k, l)] = ONE;
                        choi += kron(&unit, &images[k * nj + l].blocks[i]);
                    }
                }
                out.push(choi);
            }
        }
        out
    }

    /// Minimum eigenvalue over the Hermitian parts of the Choi blocks, with
    /// the worst Hermiticity defect folded in as a negative contribution.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let tol = self.parent.tol();
        let mut min_eig = f64::INFINITY;
        for choi in self.choi_blocks() {
            let herm_defect = fro_norm(&(&choi - choi.adjoint()));
            let m = min_herm_eig(&choi, tol) - herm_defect;
            min_eig = min_eig.min(m);
        }
        if min_eig.is_infinite() {
            0.0
        } else {
            min_eig
        }
    }

    /// Evaluate all quantum graph axioms at the parent tolerance.
    pub fn axioms(&self) -> AxiomReport {
        let tol = self.parent.tol().eq_tol;
        let choi_min = self.choi_min_eigenvalue();
        let choi_scale: f64 = self
            .choi_blocks()
            .iter()
            .map(fro_norm)
            .fold(0.0, f64::max);
        let cp = choi_min >= -tol * (1.0 + choi_scale);

        let schur_residual = match self.schur_product(self) {
            Ok(p) => fro_norm(&(&p.matrix - &self.matrix)),
            Err(_) => f64::INFINITY,
        };
        let real_residual = self.realness_residual();
        let reflexive_residual = self.reflexivity_residual();
        let kms_residual = fro_norm(&(&self.matrix - &self.kms_adjoint().matrix));
        let e = self.psi_prime();
        let undirected_residual = e.sub(&tensor_swap(&e)).map(|d| d.norm()).unwrap_or(f64::INFINITY);

        AxiomReport {
            cp,
            cp_min_eigenvalue: choi_min,
            schur_idempotent: schur_residual <= tol * (1.0 + self.norm()),
            schur_residual,
            real: real_residual <= tol * (1.0 + self.norm()),
            real_residual,
            reflexive: reflexive_residual <= tol * (1.0 + self.norm()),
            reflexive_residual,
            kms_self_adjoint: kms_residual <= tol * (1.0 + self.norm()),
            kms_residual,
            undirected: undirected_residual <= tol * (1.0 + self.norm()),
            undirected_residual,
            tol,
        }
    }

    /// Relations between the swapped operator and the Hilbert-space adjoint:
    /// the operator of Ψ'^{-1}(τ(Ψ'(A))) equals J A* J, which for real A
    /// equals nabla^{-1/2} A* nabla^{1/2}.
    pub fn hilbert_form_relations(&self) -> Result<(f64, f64)> {
        let tol = self.parent.tol().eq_tol;
        let real_residual = self.realness_residual();
        if real_residual > tol * (1.0 + self.norm()) {
            return Err(Error::NotReal { residual: real_residual });
        }
        let a_tau = SuperOperator::psi_prime_inv(&tensor_swap(&self.psi_prime()));
        let jaj = self.parent.j_sandwich(&self.matrix.adjoint());
        let first = fro_norm(&(&a_tau.matrix - &jaj));
        let kms = self.kms_adjoint();
        let second = fro_norm(&(&jaj - &kms.matrix));
        Ok((first, second))
    }
}

/// Tensor swap τ(b ⊗ c^op) = c ⊗ b^op, componentwise on the block storage.
pub fn tensor_swap(e: &TensorElement) -> TensorElement {
    let blocks = e.parent.blocks().to_vec();
    let mut out = TensorElement::zero(&e.parent);
    for (&(i, j), comp) in &e.comps {
        let (ni, nj) = (blocks[i], blocks[j]);
        let mut swapped = CMatrix::zeros(nj * ni, nj * ni);
        for k in 0..ni {
            for l in 0..ni {
                for s in 0..nj {
                    for t in 0..nj {
                        // E_{kl} ⊗ (E_{ts})^op ↦ E_{ts} ⊗ (E_{kl})^op.
                        swapped[(t * ni + l, s * ni + k)] += comp[(k * nj + s, l * nj + t)];
                    }
                }
            }
        }
        out.add_to_comp(j, i, &swapped);
    }
    out
}

/// Axiom evaluation for a candidate quantum adjacency operator.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub cp: bool,
    pub cp_min_eigenvalue: f64,
    pub schur_idempotent: bool,
    pub schur_residual: f64,
    pub real: bool,
    pub real_residual: f64,
    pub reflexive: bool,
    pub reflexive_residual: f64,
    pub kms_self_adjoint: bool,
    pub kms_residual: f64,
    pub undirected: bool,
    pub undirected_residual: f64,
    pub tol: f64,
}

impl AxiomReport {
    /// The defining pair for a quantum adjacency operator.
    pub fn is_quantum_adjacency(&self) -> bool {
        self.cp && self.schur_idempotent
    }
}

/// A subspace of B(L²(B)) given by an orthonormal basis (Hilbert-Schmidt
/// pairing) together with its orthogonal projection.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    pub parent: Algebra,
    pub basis: Vec<CMatrix>,
    pub projection: CMatrix,
}

impl OperatorSubspace {
    pub fn from_span(parent: &Algebra, mats: &[CMatrix]) -> Self {
        let d = parent.dim();
        let vecs: Vec<CVector> = mats.iter().map(mat_to_vec).collect();
        let basis_vecs = orthonormalize_euclidean(&vecs, parent.tol());
        let mut projection = CMatrix::zeros(d * d, d * d);
        for v in &basis_vecs {
            projection += outer(v, v);
        }
        let basis = basis_vecs.iter().map(|v| vec_to_mat(v, d, d)).collect();
        OperatorSubspace { parent: parent.clone(), basis, projection }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance from X to the subspace, relative to ||X||.
    pub fn membership_residual(&self, x: &CMatrix) -> f64 {
        let v = mat_to_vec(x);
        let proj = &self.projection * &v;
        let n = v.norm();
        if n == 0.0 {
            0.0
        } else {
            (v - proj).norm() / n
        }
    }

    pub fn contains(&self, x: &CMatrix) -> bool {
        self.membership_residual(x) <= self.parent.tol().eq_tol.max(1e-12) * 10.0
    }

    /// Projection distance to another subspace.
    pub fn distance(&self, other: &OperatorSubspace) -> f64 {
        fro_norm(&(&self.projection - &other.projection))
    }

    /// The adjoint set {X* : X in S}.
    pub fn adjoint_space(&self) -> OperatorSubspace {
        let mats: Vec<CMatrix> = self.basis.iter().map(|b| b.adjoint()).collect();
        OperatorSubspace::from_span(&self.parent, &mats)
    }

    /// Residual of being a B'-bimodule: closure under c' X d'.
    pub fn bimodule_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in &self.basis {
            for c in self.parent.commutant_basis() {
                for d in self.parent.commutant_basis() {
                    let y = c * x * d;
                    let v = mat_to_vec(&y);
                    let r = (&v - &self.projection * &v).norm();
                    worst = worst.max(r);
                }
            }
        }
        worst
    }

    /// Twist S_z = Q^{-iz} S Q^{iz} (left multiplications by powers of Q).
    pub fn twist(&self, z: Complex64) -> OperatorSubspace {
        let i = cx(0.0, 1.0);
        let lp = self.parent.left_mult_matrix(&self.parent.q_power(-i * z));
        let lm = self.parent.left_mult_matrix(&self.parent.q_power(i * z));
        let mats: Vec<CMatrix> = self.basis.iter().map(|x| &lp * x * &lm).collect();
        OperatorSubspace::from_span(&self.parent, &mats)
    }

    /// Twist by powers of the modular operator instead of Q.
    pub fn twist_nabla(&self, z: Complex64) -> OperatorSubspace {
        let i = cx(0.0, 1.0);
        let np = self.parent.nabla_matrix(-i * z);
        let nm = self.parent.nabla_matrix(i * z);
        let mats: Vec<CMatrix> = self.basis.iter().map(|x| &np * x * &nm).collect();
        OperatorSubspace::from_span(&self.parent, &mats)
    }
}

/// S = lin B' A B', the commutant bimodule generated by A.
pub fn bimodule_s(a: &SuperOperator) -> OperatorSubspace {
    let alg = &a.parent;
    let comm = alg.commutant_basis();
    let mut mats = Vec::with_capacity(comm.len() * comm.len());
    for c in comm {
        for d in comm {
            mats.push(c * &a.matrix * d);
        }
    }
    OperatorSubspace::from_span(alg, &mats)
}

/// Image of θ_A over a spanning set of B(L²(B)).
pub fn theta_image(a: &SuperOperator) -> Result<OperatorSubspace> {
    let alg = &a.parent;
    let d = alg.dim();
    let terms = a.rank_decomposition();
    let lefts: Vec<CMatrix> = terms.iter().map(|(b, _)| alg.left_mult_matrix(b)).collect();
    let rights: Vec<CMatrix> =
        terms.iter().map(|(_, ai)| alg.left_mult_matrix(ai).adjoint()).collect();
    let mut mats = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            let mut u = CVector::zeros(d);
            u[p] = ONE;
            let mut v = CVector::zeros(d);
            v[q] = ONE;
            let t = outer(&u, &v);
            let mut img = CMatrix::zeros(d, d);
            for (lb, ra) in lefts.iter().zip(&rights) {
                img += lb * &t * ra;
            }
            mats.push(img);
        }
    }
    Ok(OperatorSubspace::from_span(alg, &mats))
}

/// Orthonormal basis of the range of a (numerically) idempotent self-adjoint
/// matrix, using the spectral cut at 1/2.
pub fn projection_range(p: &CMatrix, alg: &Algebra) -> Result<Vec<CVector>> {
    let herm_defect = fro_norm(&(p - p.adjoint()));
    let idem_defect = fro_norm(&(p * p - p));
    let scale = 1.0 + fro_norm(p);
    if herm_defect > alg.tol().eq_tol * scale || idem_defect > alg.tol().eq_tol * scale {
        return Err(Error::NotProjection { residual: herm_defect.max(idem_defect) });
    }
    let (vals, u) = herm_eig(&((p + p.adjoint()).scale(0.5)), alg.tol())?;
    let mut out = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.5 {
            out.push(u.column(k).into_owned());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Tolerance, I, ZERO};
    use crate::sample::Sampler;

    fn example_algebra() -> Algebra {
        let qih = CMatrix::from_row_slice(2, 2, &[cx(1., 0.), cx(1., 0.), cx(1., 0.), cx(3., 0.)]);
        let q = crate::linalg::matrix_power(&qih, cx(-2.0, 0.0), &Tolerance::default()).unwrap();
        Algebra::new(&[2], BlockMat { blocks: vec![q] }, Tolerance::default()).unwrap()
    }

    fn tracial(blocks: &[usize]) -> Algebra {
        Algebra::new(blocks, BlockMat::identity(blocks), Tolerance::default()).unwrap()
    }

    fn complete_seed(alg: &Algebra) -> SuperOperator {
        let lam1 = alg.lambda(&alg.one()).unwrap();
        SuperOperator::rank_one(&lam1, &lam1).unwrap()
    }

    #[test]
    fn identity_map_on_elements() {
        let alg = example_algebra();
        let mut s = Sampler::new(5);
        let x = s.element(&alg);
        let id = SuperOperator::identity(&alg);
        let y = id.apply_element(&x).unwrap();
        assert!(y.mat.sub(&x.mat).norm() < 1e-12);
    }

    #[test]
    fn rank_one_action_on_elements() {
        // |Λ(b)><Λ(a)| maps x to phi(a* x) b.
        let alg = example_algebra();
        let mut s = Sampler::new(6);
        let a = s.element(&alg);
        let b = s.element(&alg);
        let x = s.element(&alg);
        let op = SuperOperator::rank_one(&alg.lambda(&b).unwrap(), &alg.lambda(&a).unwrap()).unwrap();
        let got = op.apply_element(&x).unwrap();
        let coeff = alg.phi(&a.adjoint().mul(&x).unwrap()).unwrap();
        let expect = b.scale(coeff);
        assert!(got.mat.sub(&expect.mat).norm() < 1e-9);
    }

    #[test]
    fn transpose_superoperator_tracial() {
        let alg = tracial(&[2]);
        let transpose = SuperOperator::from_hom_action(&alg, |m| BlockMat {
            blocks: m.blocks.iter().map(|b| b.transpose()).collect(),
        });
        let mut s = Sampler::new(31);
        let x = s.element(&alg);
        let y = transpose.apply_element(&x).unwrap();
        assert!(fro_norm(&(&y.mat.blocks[0] - x.mat.blocks[0].transpose())) < 1e-12);
    }

    #[test]
    fn schur_zero_and_idempotent_from_projection() {
        let alg = example_algebra();
        let zero = SuperOperator::zero(&alg);
        let z = zero.schur_product(&zero).unwrap();
        assert!(z.norm() < 1e-14);

        let mut s = Sampler::new(9);
        let e = s.projection(&alg);
        let a = SuperOperator::psi_prime_inv(&e);
        let aa = a.schur_product(&a).unwrap();
        assert!(fro_norm(&(&aa.matrix - &a.matrix)) < 1e-8, "Schur idempotency from projection");
    }

    #[test]
    fn schur_commutative_case_is_entrywise() {
        // Atomic algebra: the Schur product of adjacency-type operators is the
        // entrywise product of the symbol matrices.
        let blocks = [1usize, 1, 1];
        let q = BlockMat {
            blocks: vec![
                CMatrix::from_row_slice(1, 1, &[cx(0.4, 0.0)]),
                CMatrix::from_row_slice(1, 1, &[cx(0.9, 0.0)]),
                CMatrix::from_row_slice(1, 1, &[cx(1.7, 0.0)]),
            ],
        };
        let alg = Algebra::new(&blocks, q, Tolerance::default()).unwrap();
        let mut s = Sampler::new(13);
        let sym_a = s.matrix(3, 3);
        let sym_b = s.matrix(3, 3);
        // Hom action x ↦ (Σ_j sym[i][j] phi_j x_j)_i corresponds to the symbol.
        let make = |sym: CMatrix| {
            let q = alg.q().clone();
            SuperOperator::from_hom_action(&alg, move |m| {
                let mut out = BlockMat::zeros(&[1, 1, 1]);
                for i in 0..3 {
                    let mut acc = ZERO;
                    for j in 0..3 {
                        acc += sym[(i, j)] * q.blocks[j][(0, 0)] * m.blocks[j][(0, 0)];
                    }
                    out.blocks[i][(0, 0)] = acc;
                }
                out
            })
        };
        let a = make(sym_a.clone());
        let b = make(sym_b.clone());
        let ab = a.schur_product(&b).unwrap();
        let entrywise = CMatrix::from_fn(3, 3, |i, j| sym_a[(i, j)] * sym_b[(i, j)]);
        let expect = make(entrywise);
        assert!(fro_norm(&(&ab.matrix - &expect.matrix)) < 1e-9);
    }

    #[test]
    fn theta_recovers_a_from_unit_rank_one() {
        let alg = example_algebra();
        let mut s = Sampler::new(21);
        let a = s.superoperator(&alg);
        let e_op = complete_seed(&alg);
        let recovered = a.theta_apply(&e_op).unwrap();
        assert!(fro_norm(&(&recovered.matrix - &a.matrix)) < 1e-9);
    }

    #[test]
    fn theta_decomposition_independence() {
        let alg = example_algebra();
        let mut s = Sampler::new(22);
        let a = s.superoperator(&alg);
        let t = s.superoperator(&alg);
        let via_svd = a.theta_apply(&t).unwrap();
        // Alternative decomposition: columns against an arbitrary basis.
        let dim = alg.dim();
        let mut direct = CMatrix::zeros(dim, dim);
        for q in 0..dim {
            let mut bra = CVector::zeros(dim);
            bra[q] = ONE;
            let ket = a.matrix.column(q).clone_owned();
            let b = alg.lambda_inv_mat(&alg.from_coords(&ket));
            let aa = alg.lambda_inv_mat(&alg.from_coords(&bra));
            let lb = alg.left_mult_matrix(&b);
            let la = alg.left_mult_matrix(&aa);
            direct += lb * &t.matrix * la.adjoint();
        }
        assert!(fro_norm(&(&via_svd.matrix - &direct)) < 1e-9);
    }

    #[test]
    fn theta_brute_force_tracial() {
        let alg = tracial(&[2]);
        let mut s = Sampler::new(23);
        let b = s.element(&alg);
        let a_el = s.element(&alg);
        let op =
            SuperOperator::rank_one(&alg.lambda(&b).unwrap(), &alg.lambda(&a_el).unwrap()).unwrap();
        let t = s.superoperator(&alg);
        let theta = op.theta_apply(&t).unwrap();
        let lb = alg.left_mult_matrix(&b.mat);
        let la = alg.left_mult_matrix(&a_el.mat);
        let direct = lb * &t.matrix * la.adjoint();
        assert!(fro_norm(&(&theta.matrix - &direct)) < 1e-9);
    }

    #[test]
    fn psi_prime_of_unit_rank_one() {
        let alg = example_algebra();
        let e = complete_seed(&alg).psi_prime();
        let one = TensorElement::one(&alg);
        assert!(e.sub(&one).unwrap().norm() < 1e-9, "Ψ'(|Λ(1)><Λ(1)|) = 1⊗1");
    }

    #[test]
    fn psi_prime_tracial_rank_one() {
        let alg = tracial(&[2]);
        let mut s = Sampler::new(25);
        let a = s.element(&alg);
        let b = s.element(&alg);
        let op =
            SuperOperator::rank_one(&alg.lambda(&b).unwrap(), &alg.lambda(&a).unwrap()).unwrap();
        let e = op.psi_prime();
        let expect = TensorElement::simple(&alg, &b.mat, &a.mat.adjoint());
        assert!(e.sub(&expect).unwrap().norm() < 1e-9);
    }

    #[test]
    fn psi_prime_roundtrips() {
        let alg = example_algebra();
        let mut s = Sampler::new(26);
        for _ in 0..20 {
            let e = s.tensor_element(&alg);
            let a = SuperOperator::psi_prime_inv(&e);
            let back = a.psi_prime();
            assert!(back.sub(&e).unwrap().norm() < 1e-10 * (1.0 + e.norm()));
            let op = s.superoperator(&alg);
            let e2 = op.psi_prime();
            let back2 = SuperOperator::psi_prime_inv(&e2);
            assert!(fro_norm(&(&back2.matrix - &op.matrix)) < 1e-10 * (1.0 + op.norm()));
        }
    }

    #[test]
    fn psi_prime_inv_unit() {
        let alg = example_algebra();
        let a = SuperOperator::psi_prime_inv(&TensorElement::one(&alg));
        let expect = complete_seed(&alg);
        assert!(fro_norm(&(&a.matrix - &expect.matrix)) < 1e-9);
    }

    #[test]
    fn projection_gives_quantum_adjacency() {
        let alg = example_algebra();
        let mut s = Sampler::new(27);
        for _ in 0..10 {
            let e = s.projection(&alg);
            let a = SuperOperator::psi_prime_inv(&e);
            let rep = a.axioms();
            assert!(rep.cp, "cp failed: min eig {}", rep.cp_min_eigenvalue);
            assert!(rep.schur_idempotent, "schur failed: {}", rep.schur_residual);
            assert!(rep.real, "realness failed: {}", rep.real_residual);
            // Ψ'(A) is again a projection.
            let back = a.psi_prime();
            assert!(back.projection_residual() < 1e-8);
        }
    }

    #[test]
    fn negative_identity_is_not_cp() {
        let alg = example_algebra();
        let a = SuperOperator::identity(&alg).scale(cx(-1.0, 0.0));
        let rep = a.axioms();
        assert!(!rep.cp);
    }

    #[test]
    fn complete_seed_passes_axioms() {
        let alg = example_algebra();
        let rep = complete_seed(&alg).axioms();
        assert!(rep.cp && rep.schur_idempotent);
        assert!(rep.reflexive, "complete graph is reflexive: {}", rep.reflexive_residual);
    }

    #[test]
    fn bimodule_equals_theta_image() {
        let alg = example_algebra();
        let mut s = Sampler::new(29);
        let e = s.projection(&alg);
        let a = SuperOperator::psi_prime_inv(&e);
        let s1 = bimodule_s(&a);
        let s2 = theta_image(&a).unwrap();
        assert!(s1.distance(&s2) < 1e-8, "distance {}", s1.distance(&s2));
    }

    #[test]
    fn bimodule_of_complete_seed_block1() {
        let q = BlockMat { blocks: vec![CMatrix::from_row_slice(1, 1, &[cx(0.8, 0.0)])] };
        let alg = Algebra::new(&[1], q, Tolerance::default()).unwrap();
        let s = bimodule_s(&complete_seed(&alg));
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn bimodule_of_identity_tracial_m2() {
        // A = id on tracial M2: S = B' id B' = right multiplications, dim 4.
        let alg = tracial(&[2]);
        let s = bimodule_s(&SuperOperator::identity(&alg));
        assert_eq!(s.dim(), 4);
        for c in alg.commutant_basis() {
            assert!(s.membership_residual(c) < 1e-9);
        }
    }

    #[test]
    fn twist_identity_cases() {
        let alg = example_algebra();
        let mut s = Sampler::new(33);
        let e = s.projection(&alg);
        let a = SuperOperator::psi_prime_inv(&e);
        let sp = bimodule_s(&a);
        let t0 = sp.twist(ZERO);
        assert!(sp.distance(&t0) < 1e-9);
        // Tracial algebra: twists are trivial for every z.
        let tr = tracial(&[2]);
        let e2 = Sampler::new(34).projection(&tr);
        let sp2 = bimodule_s(&SuperOperator::psi_prime_inv(&e2));
        let t2 = sp2.twist(cx(0.3, 0.9));
        assert!(sp2.distance(&t2) < 1e-9);
    }

    #[test]
    fn twist_roundtrip_and_q_vs_nabla() {
        let alg = example_algebra();
        let mut s = Sampler::new(35);
        let e = s.projection(&alg);
        let a = SuperOperator::psi_prime_inv(&e);
        let sp = bimodule_s(&a);
        let z = cx(0.0, 0.25);
        let tw = sp.twist(z);
        let back = tw.twist(-z);
        assert!(sp.distance(&back) < 1e-8);
        // Q-twist equals nabla-twist on commutant bimodules.
        let tn = sp.twist_nabla(z);
        assert!(tw.distance(&tn) < 1e-8, "distance {}", tw.distance(&tn));
    }

    #[test]
    fn kms_adjoint_tracial_is_adjoint() {
        let alg = tracial(&[2]);
        let mut s = Sampler::new(37);
        let a = s.superoperator(&alg);
        let k = a.kms_adjoint();
        assert!(fro_norm(&(&k.matrix - a.matrix.adjoint())) < 1e-10);
    }

    #[test]
    fn kms_adjoint_pairing_and_involution() {
        let alg = example_algebra();
        let mut s = Sampler::new(38);
        for _ in 0..20 {
            let a = s.superoperator(&alg);
            let x = s.element(&alg);
            let y = s.element(&alg);
            // (a|b)_K = phi(a* sigma_{-i/2}(b)).
            let kms_ip = |u: &AlgebraElement, v: &AlgebraElement| {
                alg.phi(&u.adjoint().mul(&alg.sigma(v, cx(0.0, -0.5)).unwrap()).unwrap()).unwrap()
            };
            let ax = a.apply_element(&x).unwrap();
            let aky = a.kms_adjoint().apply_element(&y).unwrap();
            let lhs = kms_ip(&x, &aky);
            let rhs = kms_ip(&ax, &y);
            assert!((lhs - rhs).norm() < 1e-9, "KMS pairing identity");
            let back = a.kms_adjoint().kms_adjoint();
            assert!(fro_norm(&(&back.matrix - &a.matrix)) < 1e-9);
        }
    }

    #[test]
    fn swap_examples_and_involution() {
        let alg = example_algebra();
        let one = TensorElement::one(&alg);
        assert!(tensor_swap(&one).sub(&one).unwrap().norm() < 1e-12);
        let mut s = Sampler::new(39);
        let b = s.element(&alg);
        let c = s.element(&alg);
        let simple = TensorElement::simple(&alg, &b.mat, &c.mat);
        let swapped = tensor_swap(&simple);
        let expect = TensorElement::simple(&alg, &c.mat, &b.mat);
        assert!(swapped.sub(&expect).unwrap().norm() < 1e-12);
        let twice = tensor_swap(&swapped);
        assert!(twice.sub(&simple).unwrap().norm() < 1e-12);
        // Star compatibility τ(e)* = τ(e*).
        let e = s.tensor_element(&alg);
        let lhs = tensor_swap(&e).adjoint();
        let rhs = tensor_swap(&e.adjoint());
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
    }

    #[test]
    fn swap_matches_kms_adjoint() {
        let alg = example_algebra();
        let mut s = Sampler::new(40);
        for _ in 0..10 {
            // General identity: Ψ'(A*_K) = τ(Ψ'(A)*).
            let a = s.superoperator(&alg);
            let lhs = a.kms_adjoint().psi_prime();
            let rhs = tensor_swap(&a.psi_prime().adjoint());
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-9 * (1.0 + a.norm()));
            // For self-adjoint projections the star can be dropped.
            let e = s.projection(&alg);
            let a = SuperOperator::psi_prime_inv(&e);
            let lhs = a.kms_adjoint().psi_prime();
            let rhs = tensor_swap(&a.psi_prime());
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn self_swap_projection_gives_kms_self_adjoint() {
        let alg = example_algebra();
        let mut s = Sampler::new(41);
        // Symmetrise a projection: p = (e + τ(e))/2 is not a projection, so
        // instead take the spectral projection of e + τ(e) above 1/2 after
        // sampling e; simpler: build from a swap-invariant Hermitian.
        let nb = alg.blocks().len();
        let mut h = TensorElement::zero(&alg);
        for i in 0..nb {
            for j in 0..nb {
                let d = alg.blocks()[i] * alg.blocks()[j];
                h.set_comp(i, j, s.hermitian(d)).unwrap();
            }
        }
        let h = h.add(&tensor_swap(&h)).unwrap().scale(cx(0.5, 0.0));
        // Spectral projection of each component is not swap-invariant in
        // general; use the full spectral cut of the swapped-symmetric element
        // through its action as a single matrix per component pair. For the
        // single-block case the component is swap-stable.
        let comp = h.comp(0, 0);
        let (vals, u) = herm_eig(&comp, alg.tol()).unwrap();
        let mut p = CMatrix::zeros(comp.nrows(), comp.ncols());
        for (k, &v) in vals.iter().enumerate() {
            if v > 0.0 {
                let col = u.column(k);
                p += &col * col.adjoint();
            }
        }
        let mut e = TensorElement::zero(&alg);
        e.set_comp(0, 0, p).unwrap();
        if e.sub(&tensor_swap(&e)).unwrap().norm() < 1e-10 {
            let a = SuperOperator::psi_prime_inv(&e);
            let k = a.kms_adjoint();
            assert!(fro_norm(&(&k.matrix - &a.matrix)) < 1e-8);
        }
    }

    #[test]
    fn hilbert_form_relations_hold() {
        let alg = example_algebra();
        let id = SuperOperator::identity(&alg);
        let (r1, r2) = id.hilbert_form_relations().unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10);

        let mut s = Sampler::new(43);
        let e = s.projection(&alg);
        let a = SuperOperator::psi_prime_inv(&e);
        let (r1, r2) = a.hilbert_form_relations().unwrap();
        assert!(r1 < 1e-8, "swap operator vs J A* J: {r1}");
        assert!(r2 < 1e-8, "J A* J vs KMS adjoint form: {r2}");
    }

    #[test]
    fn hilbert_form_tracial_direct() {
        let alg = tracial(&[2]);
        let mut s = Sampler::new(44);
        let e = s.projection(&alg);
        let a = SuperOperator::psi_prime_inv(&e);
        let (r1, r2) = a.hilbert_form_relations().unwrap();
        assert!(r1 < 1e-9 && r2 < 1e-9);
        // Non-real operators are rejected.
        let mut m = CMatrix::zeros(alg.dim(), alg.dim());
        m[(0, 1)] = I;
        let bad = SuperOperator::new(alg.clone(), m).unwrap();
        if bad.realness_residual() > 1e-6 {
            assert!(matches!(bad.hilbert_form_relations(), Err(Error::NotReal { .. })));
        }
    }

    #[test]
    fn twisted_membership_identity() {
        // T in S_{i/4} iff Σ_j sigma_{-i/4}(b_j) T sigma_{i/4}(a_j)* = T.
        let alg = example_algebra();
        let mut s = Sampler::new(45);
        for _ in 0..5 {
            let e = s.projection(&alg);
            let a = SuperOperator::psi_prime_inv(&e);
            let sp = bimodule_s(&a);
            let tw = sp.twist(cx(0.0, 0.25));
            let terms = a.rank_decomposition();
            for t in &tw.basis {
                let mut acc = CMatrix::zeros(alg.dim(), alg.dim());
                for (b, ai) in &terms {
                    let lb = alg.left_mult_matrix(&alg.sigma_mat(b, cx(0.0, -0.25)));
                    let la = alg.left_mult_matrix(&alg.sigma_mat(ai, cx(0.0, 0.25)));
                    acc += lb * t * la.adjoint();
                }
                assert!(fro_norm(&(&acc - t)) < 1e-8, "twisted idempotent identity");
            }
        }
    }

    #[test]
    fn reflexivity_transfer() {
        // 1 ∈ S iff 1 ∈ S_{i/4}.
        let alg = example_algebra();
        let mut s = Sampler::new(46);
        let id = CMatrix::identity(alg.dim(), alg.dim());
        for _ in 0..5 {
            let e = s.projection(&alg);
            let a = SuperOperator::psi_prime_inv(&e);
            let sp = bimodule_s(&a);
            let tw = sp.twist(cx(0.0, 0.25));
            let in_s = sp.membership_residual(&id) < 1e-8;
            let in_t = tw.membership_residual(&id) < 1e-8;
            assert_eq!(in_s, in_t);
        }
        // The complete seed contains 1 in both.
        let a = complete_seed(&alg);
        let sp = bimodule_s(&a);
        assert!(sp.membership_residual(&id) < 1e-8);
        assert!(sp.twist(cx(0.0, 0.25)).membership_residual(&id) < 1e-8);
    }
}
