//! The operator-valued weight inverse to phi on B(L²(B)): the averaging
//! formula over an orthonormal GNS basis, the scalar weight with density
//! nabla^{-1}, the hat-map into Hilbert-Schmidt vectors, and slice-map
//! adjacency operators A_{f,g}.

use num_complex::Complex64;

use crate::algebra::{Algebra, BlockMat, TensorElement};
use crate::error::Result;
use crate::graph::SuperOperator;
use crate::linalg::{cx, fro_norm, CMatrix};

/// An element of the commutant B' presented as an operator on L²(B).
#[derive(Debug, Clone)]
pub struct CommutantElement {
    pub parent: Algebra,
    pub mat: CMatrix,
}

impl CommutantElement {
    /// Worst commutator norm against left multiplications.
    pub fn commutation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in self.parent.unit_left_ops() {
            worst = worst.max(fro_norm(&(l * &self.mat - &self.mat * l)));
        }
        worst
    }
}

/// phi^{-1}(X) = Σ_k sigma_{i/2}(d_k)* X sigma_{i/2}(d_k) for any algebraic
/// basis (d_k) of B with (Λ(d_k)) orthonormal.
pub fn phi_inverse(x: &SuperOperator) -> CommutantElement {
    let alg = &x.parent;
    let basis: Vec<BlockMat> = alg.basis().iter().map(|f| alg.lambda_inv_mat(f)).collect();
    phi_inverse_with_basis(x, &basis)
}

/// The averaging formula over an explicit Λ-orthonormal basis; the result is
/// independent of the choice.
pub fn phi_inverse_with_basis(x: &SuperOperator, basis: &[BlockMat]) -> CommutantElement {
    let alg = &x.parent;
    let d = alg.dim();
    let mut out = CMatrix::zeros(d, d);
    for dk in basis {
        let s = alg.sigma_mat(dk, cx(0.0, 0.5));
        let l = alg.left_mult_matrix(&s);
        out += l.adjoint() * &x.matrix * l;
    }
    CommutantElement { parent: alg.clone(), mat: out }
}

/// The weight on the commutant determined by phi'(J x* J) = phi(x).
pub fn phi_prime(c: &CommutantElement) -> Complex64 {
    let alg = &c.parent;
    // A commutant element is right multiplication by y; recover y from the
    // action on Λ(1) and evaluate phi(y).
    let lam1 = alg.lambda_mat(&BlockMat::identity(alg.blocks()));
    let image = alg.from_coords(&(&c.mat * alg.coords(&lam1)));
    let y = alg.q_neg_half().mul(&image);
    alg.phi_mat(&y)
}

/// tilde_phi(X) = Tr(nabla^{-1} X) on B(L²(B)).
pub fn tilde_phi(x: &SuperOperator) -> Complex64 {
    let n_inv = x.parent.nabla_matrix(cx(-1.0, 0.0));
    (n_inv * &x.matrix).diagonal().sum()
}

/// The same weight computed as phi' composed with phi^{-1}.
pub fn tilde_phi_via_weight(x: &SuperOperator) -> Complex64 {
    phi_prime(&phi_inverse(x))
}

/// The hat of an operator as a Hilbert-Schmidt vector: alpha nabla^{-1/2},
/// the unitary identification of B(L²(B)) with L²(B) ⊗ conj(L²(B)).
pub fn hat_vector(alpha: &SuperOperator) -> CMatrix {
    let nh = alpha.parent.nabla_matrix(cx(-0.5, 0.0));
    &alpha.matrix * nh
}

/// tilde_phi inner product (a|b) = tilde_phi(a* b).
pub fn tilde_phi_dot(a: &SuperOperator, b: &SuperOperator) -> Complex64 {
    let n_inv = a.parent.nabla_matrix(cx(-1.0, 0.0));
    (n_inv * a.matrix.adjoint() * &b.matrix).diagonal().sum()
}

/// Slice-map adjacency A_{f,g}: with f* g = Σ_k x_k ⊗ y_k, the map
/// x ↦ Σ_k phi(sigma_{i/2}(y_k) x) x_k on B, lifted to L²(B).
pub fn slice_adjacency(f: &TensorElement, g: &TensorElement) -> Result<SuperOperator> {
    f.parent.check_parent(&g.parent)?;
    let alg = &f.parent;
    let h = f.adjoint().mul(g)?;
    let blocks = alg.blocks().to_vec();
    // Pre-contract the functional phi(sigma_{i/2}(E_ts) ·) per op-side unit:
    // the weight matrix W_{j,(t,s)} = Q_j sigma_{i/2}(E_ts) acts on block j.
    let q = alg.q().clone();
    let mut weights: Vec<Vec<CMatrix>> = Vec::with_capacity(blocks.len());
    for (j, &nj) in blocks.iter().enumerate() {
        let mut per_unit = Vec::with_capacity(nj * nj);
        for t in 0..nj {
            for s in 0..nj {
                let mut unit = BlockMat::zeros(&blocks);
                unit.blocks[j][(t, s)] = crate::linalg::ONE;
                let sig = alg.sigma_mat(&unit, cx(0.0, 0.5));
                per_unit.push(&q.blocks[j] * &sig.blocks[j]);
            }
        }
        weights.push(per_unit);
    }
    let comps = h.comps.clone();
    Ok(SuperOperator::from_hom_action(alg, move |x| {
        let mut out = BlockMat::zeros(&blocks);
        for (&(i, j), comp) in &comps {
            let (ni, nj) = (blocks[i], blocks[j]);
            let xj = &x.blocks[j];
            for k in 0..ni {
                for l in 0..ni {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..nj {
                        for s in 0..nj {
                            let c = comp[(k * nj + s, l * nj + t)];
                            if c.norm() == 0.0 {
                                continue;
                            }
                            // phi(sigma_{i/2}(E_ts) x) = Tr(W x_j).
                            let w = &weights[j][t * nj + s];
                            let mut tr = Complex64::new(0.0, 0.0);
                            for a in 0..nj {
                                for b in 0..nj {
                                    tr += w[(a, b)] * xj[(b, a)];
                                }
                            }
                            acc += c * tr;
                        }
                    }
                    out.blocks[i][(k, l)] += acc;
                }
            }
        }
        out
    }))
}
