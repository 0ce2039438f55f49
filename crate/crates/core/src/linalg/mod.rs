//! Dense linear algebra shared by both recovery paths.
//!
//! Matrices are row-major throughout. External surfaces (CSV, CLI, errors)
//! speak 1-based indices; everything in here is 0-based.

mod cholesky;
mod matrix;
mod ops;
pub mod text;

pub use cholesky::{solve_spd, solve_spd_flops, PIVOT_EPSILON, SYMMETRY_TOLERANCE};
pub use matrix::{DenseMatrix, DenseVector};
pub use ops::{
    column_norms, frobenius_norm, kron, matmul, matmul_nt, matmul_tn, matvec, matvec_t, outer,
    stretch, unstretch,
};

pub(crate) use matrix::{axpy, dot};
pub(crate) use ops::{kron_shape, matmul_into, matmul_tn_into};
