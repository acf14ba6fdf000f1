//! The commutative atomic case: weighted relations on a finite index set,
//! their adjacency matrices, degrees, Schur-multiplier symbols, and the
//! embedding into the general block machinery.

use std::collections::BTreeSet;

use crate::algebra::{Algebra, BlockMat, TensorElement};
use crate::error::{Error, Result};
use crate::linalg::{cx, CMatrix, Tolerance, ONE};

/// A relation on {0, .., n-1} with strictly positive vertex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRelation {
    pub n: usize,
    pub weights: Vec<f64>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl WeightedRelation {
    pub fn new(n: usize, weights: Vec<f64>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} vertices",
                weights.len(),
                n
            )));
        }
        if let Some(w) = weights.iter().find(|w| **w <= 0.0) {
            return Err(Error::NotPositive { min_eig: *w });
        }
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if i >= n || j >= n {
                return Err(Error::ShapeMismatch(format!("edge ({i},{j}) out of range")));
            }
        }
        Ok(WeightedRelation { n, weights, edges })
    }

    pub fn relates(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Weighted adjacency matrix with entries [i~j] φ_j.
    pub fn adjacency_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| {
            if self.relates(i, j) {
                cx(self.weights[j], 0.0)
            } else {
                cx(0.0, 0.0)
            }
        })
    }

    /// Degree vector: entry i is Σ_{j: i~j} φ_j.
    pub fn degree_vector(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for &(i, j) in &self.edges {
            out[i] += self.weights[j];
        }
        out
    }

    pub fn max_degree(&self) -> f64 {
        self.degree_vector().into_iter().fold(0.0, f64::max)
    }

    /// 0/1 symbol of the Schur multiplier θ.
    pub fn schur_symbol(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| {
            if self.relates(i, j) {
                ONE
            } else {
                cx(0.0, 0.0)
            }
        })
    }

    /// Apply the symbol entrywise to a matrix on ℓ²_n.
    pub fn schur_multiply(&self, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| {
            if self.relates(i, j) {
                m[(i, j)]
            } else {
                cx(0.0, 0.0)
            }
        })
    }

    /// Embed into the block machinery: the atomic algebra with Q = diag(φ)
    /// and the projection e = Σ_{i~j} E_ii ⊗ E_jj.
    pub fn embed(&self, tol: Tolerance) -> Result<(Algebra, TensorElement)> {
        let blocks = vec![1usize; self.n];
        let mut q = BlockMat::zeros(&blocks);
        for (i, w) in self.weights.iter().enumerate() {
            q.blocks[i][(0, 0)] = cx(*w, 0.0);
        }
        let alg = Algebra::new(&blocks, q, tol)?;
        let mut e = TensorElement::zero(&alg);
        for &(i, j) in &self.edges {
            e.set_comp(i, j, CMatrix::identity(1, 1))?;
        }
        Ok((alg, e))
    }
}
