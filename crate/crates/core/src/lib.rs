//! Numerics for finite-dimensional quantum graphs over B = ⊕_i M_{n(i)} with
//! a faithful state phi = Tr(Q ·): the four equivalent presentations
//! (adjacency operator, projection in B ⊗ B^op, Hilbert-Schmidt subspace,
//! commutant bimodule), the modular machinery connecting them, operator-valued
//! weight inverses, Kraus representations, tracial transport and
//! connectivity.

pub mod algebra;
pub mod atomic;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod relation;
pub mod sample;
pub mod transport;
pub mod weight;

pub use algebra::{Algebra, AlgebraElement, BlockMat, GnsVector, TensorElement};
pub use error::{Error, Result};
pub use graph::{AxiomReport, OperatorSubspace, SuperOperator};
pub use linalg::{CMatrix, CVector, Tolerance};
pub use relation::{BlockFamily, HsSubspace};
