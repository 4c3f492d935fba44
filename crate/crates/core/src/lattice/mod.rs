//! Exact integer linear algebra: Smith normal form, weight-matrix
//! faithfulness, unimodular completion, integer kernels and quotient groups.
//!
//! Everything works on arbitrary-precision integers, so there are no overflow
//! cases. Matrices are small (desk scale); no attempt is made at sparse or
//! modular methods.

mod matrix;
mod ops;
mod snf;

use thiserror::Error;

pub use matrix::{Int, IntMatrix};
pub use ops::{
    column_hermite_basis, exact_ratio, has_unit_invariant_factors, is_faithful_weight_matrix,
    kernel_lattice, quotient_structure, rational_kernel_basis, solve_in_lattice,
    unimodular_completion, QuotientStructure,
};
pub use snf::{invariant_factors, smith_normal_form, SnfResult};

pub(crate) use matrix::echelon_rank;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("weight matrix is not faithful, so it has no unimodular completion")]
    NotCompletable,
    #[error("division by the zero vector")]
    ZeroDivisor,
    #[error("the sub-lattice is not contained in the ambient lattice")]
    NotASublattice,
    #[error("the ambient generators are linearly dependent")]
    DependentBasis,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Converts a slice of small integers.
pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}
