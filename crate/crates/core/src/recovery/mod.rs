//! Orthogonal matching pursuit over a separable dictionary, in two forms:
//!
//! * [`omp1d`] works on the explicit Kronecker dictionary `Ω = A ⊗ A` and the
//!   stretched sample `y`. Its projection step costs `O(m² n²)` and `Ω` needs
//!   `O(m² n²)` memory.
//! * [`omp2d`] works on `A` and the sample matrix `Y` directly, with rank-1
//!   atoms `B_{i,j} = a_i a_jᵀ`. Projection is `Aᵀ R A ./ P`, `O(m n²)`, and
//!   nothing larger than `max(n², m n)` is ever allocated.
//!
//! Both select the same atom at every iteration (atom `(i, j)` corresponds to
//! flat index `n (i - 1) + j`) and solve the same normal equations, so their
//! outputs agree up to rounding. [`compare`] checks that.

mod equivalence;
mod omp1d;
mod omp2d;

pub use equivalence::{compare, values_close, Equivalence, EQUIVALENCE_TOLERANCE};
pub use omp1d::{omega_atom_norms, omp1d, project_1d};
pub use omp2d::{build_normal_system_2d, omp2d, project_2d, NormalSystem2d};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Default early-stop threshold on `‖residual‖ / ‖input‖`.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmpConfig {
    /// Sparsity level: the maximum number of iterations.
    pub k: usize,
    /// Stop once the residual norm is at most `tol · ‖input‖`.
    pub tol: f64,
}

impl OmpConfig {
    pub fn new(k: usize) -> Self {
        Self { k, tol: DEFAULT_TOL }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub(crate) fn validate(&self, atoms: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("sparsity level k must be at least 1".into()));
        }
        if self.k > atoms {
            return Err(Error::InvalidArgument(format!(
                "sparsity level {} exceeds the {atoms} available atoms",
                self.k
            )));
        }
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be a finite non-negative number, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// 2D atom coordinate, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomPair {
    pub row: usize,
    pub col: usize,
}

impl AtomPair {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// 1-based flat index `n (row - 1) + col` of the matching column of `Ω`.
    pub fn flat(self, n: usize) -> usize {
        n * (self.row - 1) + self.col
    }

    /// Inverse of [`AtomPair::flat`].
    pub fn from_flat(n: usize, flat: usize) -> Self {
        Self {
            row: (flat - 1) / n + 1,
            col: (flat - 1) % n + 1,
        }
    }
}

/// Multiply-add counts per phase of one recovery run.
///
/// Divisions by atom norms, the argmax scan, and norm evaluations for the
/// stopping rule are not counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlopCounts {
    pub project: u64,
    pub weights: u64,
    pub residual: u64,
}

impl FlopCounts {
    pub fn total(&self) -> u64 {
        self.project + self.weights + self.residual
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// `k` atoms were selected.
    SparsityReached,
    /// The residual fell to `tol · ‖input‖` before `k` selections.
    ResidualBelowTolerance,
    /// Every remaining atom is unusable or already selected.
    AtomsExhausted,
}

/// Output of a recovery run.
///
/// `Id` is the atom identifier (`usize` flat index for 1D, [`AtomPair`] for
/// 2D, both 1-based) and `C` the reconstructed coefficient container.
#[derive(Clone, Debug)]
pub struct OmpResult<Id, C> {
    /// Selected atoms in selection order; pairwise distinct.
    pub selected: Vec<Id>,
    /// Least-squares weights aligned with `selected`.
    pub weights: DenseVector,
    /// Residual norm after each completed iteration.
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    /// Sparse reconstruction with `weights` scattered at `selected`.
    pub coefficients: C,
    pub flops: FlopCounts,
    pub termination: Termination,
    /// Zero-norm atoms excluded from selection, 1-based flat indices.
    pub unusable_atoms: Vec<usize>,
}

/// 1D result: flat atom indices and a length-`n²` coefficient vector.
pub type Omp1dResult = OmpResult<usize, DenseVector>;

/// 2D result: atom pairs and an `n × n` coefficient matrix.
pub type Omp2dResult = OmpResult<AtomPair, crate::linalg::DenseMatrix>;

/// State of a run that aborted, as of its last completed iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialRecovery {
    /// 1-based flat indices, including the atom whose addition failed.
    pub selected_flat: Vec<usize>,
    /// Weights from the last successful refit (one fewer than `selected_flat`).
    pub weights: DenseVector,
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    pub flops: FlopCounts,
}

/// Index of the largest `|score|` among available atoms. Ties go to the
/// smallest index; NaN scores never win.
pub(crate) fn argmax_available(scores: &[f64], available: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, (&s, &ok)) in scores.iter().zip(available).enumerate() {
        if !ok {
            continue;
        }
        let v = s.abs();
        match best {
            Some((_, b)) if v.is_nan() || v <= b => {}
            _ if v.is_nan() => {}
            _ => best = Some((idx, v)),
        }
    }
    best.map(|(idx, _)| idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_pair_flat_round_trip() {
        let n = 7;
        for flat in 1..=n * n {
            let p = AtomPair::from_flat(n, flat);
            assert!(p.row >= 1 && p.row <= n && p.col >= 1 && p.col <= n);
            assert_eq!(p.flat(n), flat);
        }
        assert_eq!(AtomPair::new(2, 3).flat(4), 7);
    }

    #[test]
    fn argmax_rules() {
        let avail = [true; 4];
        assert_eq!(argmax_available(&[1.0, -3.0, 3.0, 2.0], &avail), Some(1));
        assert_eq!(argmax_available(&[0.0; 4], &avail), Some(0));
        assert_eq!(
            argmax_available(&[5.0, -3.0, 3.0, 2.0], &[false, true, true, true]),
            Some(1)
        );
        assert_eq!(argmax_available(&[f64::NAN, 1.0], &[true, true]), Some(1));
        assert_eq!(argmax_available(&[1.0, 2.0], &[false, false]), None);
    }

    #[test]
    fn config_validation() {
        assert!(OmpConfig::new(0).validate(4).is_err());
        assert!(OmpConfig::new(5).validate(4).is_err());
        assert!(OmpConfig::new(4).validate(4).is_ok());
        assert!(OmpConfig::new(1).with_tol(-1.0).validate(4).is_err());
        assert!(OmpConfig::new(1).with_tol(f64::NAN).validate(4).is_err());
        assert_eq!(OmpConfig::new(3).tol, DEFAULT_TOL);
    }
}
