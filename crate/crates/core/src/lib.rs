//! Recovery of 2D sparse signals from separable compressive samples.
//!
//! A signal `X = Ψ Z Ψᵀ` with `k` nonzeros in `Z` is measured as
//! `Y = Φ X Φᵀ = A Z Aᵀ`. Two greedy decoders recover `Z`:
//!
//! * [`recovery::omp1d`], classic OMP on the stretched problem
//!   `y = (A ⊗ A) z`;
//! * [`recovery::omp2d`], OMP on rank-1 matrix atoms `a_i a_jᵀ`, which never
//!   forms `A ⊗ A`.
//!
//! The two select identical atoms and weights. [`bench`] times them against
//! each other and writes CSV reports.

pub mod bench;
pub mod error;
pub mod linalg;
pub mod recovery;
pub mod sensing;
pub mod signalgen;

pub use error::{Error, Result};
