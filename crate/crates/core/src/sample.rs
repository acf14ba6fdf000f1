//! Seeded random generation of test objects: Hermitian matrices, positive
//! densities, projections in B ⊗ B^op (spectral projections of GUE-like
//! Hermitians with a random eigenvalue cut), elements and superoperators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::algebra::{Algebra, AlgebraElement, BlockMat, TensorElement};
use crate::graph::SuperOperator;
use crate::linalg::{cx, herm_eig, CMatrix, CVector, Tolerance};

pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn complex(&mut self) -> Complex64 {
        cx(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        DMatrix::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn vector(&mut self, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| self.complex())
    }

    /// GUE-like Hermitian matrix.
    pub fn hermitian(&mut self, n: usize) -> CMatrix {
        let m = self.matrix(n, n);
        (&m + m.adjoint()).scale(0.5)
    }

    /// Positive definite matrix with spectrum bounded away from zero.
    pub fn positive(&mut self, n: usize) -> CMatrix {
        let m = self.matrix(n, n);
        &m * m.adjoint() + CMatrix::identity(n, n).scale(0.3)
    }

    pub fn positive_q(&mut self, blocks: &[usize]) -> BlockMat {
        BlockMat { blocks: blocks.iter().map(|&n| self.positive(n)).collect() }
    }

    pub fn block_mat(&mut self, blocks: &[usize]) -> BlockMat {
        BlockMat { blocks: blocks.iter().map(|&n| self.matrix(n, n)).collect() }
    }

    pub fn element(&mut self, alg: &Algebra) -> AlgebraElement {
        alg.element(self.block_mat(alg.blocks())).expect("sampled shape matches")
    }

    pub fn positive_element(&mut self, alg: &Algebra) -> AlgebraElement {
        let m = self.block_mat(alg.blocks());
        alg.element(m.mul(&m.adjoint())).expect("sampled shape matches")
    }

    pub fn superoperator(&mut self, alg: &Algebra) -> SuperOperator {
        SuperOperator::new(alg.clone(), self.matrix(alg.dim(), alg.dim())).unwrap()
    }

    /// Spectral projection of a GUE-like Hermitian with a uniformly random
    /// eigenvalue cut, applied independently on each (i,j) component.
    pub fn projection(&mut self, alg: &Algebra) -> TensorElement {
        let tol = *alg.tol();
        let nblocks = alg.blocks().len();
        let mut e = TensorElement::zero(alg);
        for i in 0..nblocks {
            for j in 0..nblocks {
                let d = alg.blocks()[i] * alg.blocks()[j];
                let rank = self.rng.gen_range(0..=d);
                if rank == 0 {
                    continue;
                }
                let p = self.projection_of_rank(d, rank, &tol);
                e.set_comp(i, j, p).unwrap();
            }
        }
        e
    }

    /// Rank-`rank` spectral projection on a d-dimensional space.
    pub fn projection_of_rank(&mut self, d: usize, rank: usize, tol: &Tolerance) -> CMatrix {
        assert!(rank <= d);
        let h = self.hermitian(d);
        let (_, u) = herm_eig(&h, tol).expect("sampled Hermitian");
        let mut p = CMatrix::zeros(d, d);
        // Take the eigenvectors at the top of the spectrum.
        for k in (d - rank)..d {
            let col = u.column(k);
            p += &col * col.adjoint();
        }
        p
    }

    /// Projection with a prescribed total rank, eigenvectors chosen from the
    /// top of the spectrum across all components.
    pub fn projection_with_rank(&mut self, alg: &Algebra, rank: usize) -> crate::Result<TensorElement> {
        let nblocks = alg.blocks().len();
        let max: usize = {
            let mut total = 0;
            for i in 0..nblocks {
                for j in 0..nblocks {
                    total += alg.blocks()[i] * alg.blocks()[j];
                }
            }
            total
        };
        if rank > max {
            return Err(crate::Error::BadRank { rank, max });
        }
        let tol = *alg.tol();
        // Sample a Hermitian per component, pool eigenvalues, keep the top `rank`.
        let mut pool: Vec<(f64, usize, usize, usize)> = Vec::new();
        let mut eigs: std::collections::BTreeMap<(usize, usize), (Vec<f64>, CMatrix)> =
            std::collections::BTreeMap::new();
        for i in 0..nblocks {
            for j in 0..nblocks {
                let d = alg.blocks()[i] * alg.blocks()[j];
                let h = self.hermitian(d);
                let (vals, u) = herm_eig(&h, &tol).expect("sampled Hermitian");
                for (k, &v) in vals.iter().enumerate() {
                    pool.push((v, i, j, k));
                }
                eigs.insert((i, j), (vals, u));
            }
        }
        pool.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut e = TensorElement::zero(alg);
        for &(_, i, j, k) in pool.iter().take(rank) {
            let (_, u) = &eigs[&(i, j)];
            let col = u.column(k);
            let rank_one = &col * col.adjoint();
            e.add_to_comp(i, j, &rank_one);
        }
        Ok(e)
    }

    pub fn tensor_element(&mut self, alg: &Algebra) -> TensorElement {
        let nblocks = alg.blocks().len();
        let mut e = TensorElement::zero(alg);
        for i in 0..nblocks {
            for j in 0..nblocks {
                let d = alg.blocks()[i] * alg.blocks()[j];
                e.set_comp(i, j, self.matrix(d, d)).unwrap();
            }
        }
        e
    }

    /// Random unitary (QR of a random matrix, phases fixed).
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        let m = self.matrix(n, n);
        let qr = m.qr();
        let q = qr.q();
        let r = qr.r();
        // Normalise so the diagonal of R is positive; keeps Q unitary.
        let mut phases = CMatrix::identity(n, n);
        for k in 0..n {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                phases[(k, k)] = d / d.norm();
            }
        }
        q * phases
    }
}
