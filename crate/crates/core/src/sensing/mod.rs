//! Transform, sensing operator, and effective dictionary.
//!
//! A 2D signal `X = Ψ Z Ψᵀ` is measured separably as `Y = Φ X Φᵀ = A Z Aᵀ`
//! with `A = Φ Ψ`. Stretching both sides gives `y = (A ⊗ A) z = Ω z`, the
//! 1D formulation.

mod rng;

use std::path::Path;

pub use rng::{splitmix64, RandomStream, RngSeed, GENERATOR_VERSION};

use crate::error::{Error, Result};
use crate::linalg::{self, column_norms, kron_shape, matmul, matmul_nt, DenseMatrix, DenseVector};

/// Orthonormal DCT-II matrix: entry `(k, j)` is
/// `s_k cos(π (2j + 1) k / 2n)` with `s_0 = √(1/n)` and `s_k = √(2/n)`.
///
/// Applied on both sides (`Ψ Z Ψᵀ`) it realizes the separable 2D DCT.
pub fn dct_matrix(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::Dimension("DCT size must be at least 1".into()));
    }
    let nf = n as f64;
    let s0 = (1.0 / nf).sqrt();
    let sk = (2.0 / nf).sqrt();
    Ok(DenseMatrix::from_fn(n, n, |k, j| {
        let s = if k == 0 { s0 } else { sk };
        // Reduce the argument modulo the period exactly in integers first.
        let phase = ((2 * j + 1) * k) % (4 * n);
        s * (std::f64::consts::PI * phase as f64 / (2.0 * nf)).cos()
    }))
}

/// `m × n` matrix of i.i.d. standard normal entries, filled row-major from
/// one stream seeded by `seed`.
pub fn gaussian_matrix(m: usize, n: usize, seed: RngSeed) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!(
            "gaussian matrix dimensions must be positive, got {m}x{n}"
        )));
    }
    let mut stream = RandomStream::new(seed);
    Ok(DenseMatrix::from_fn(m, n, |_, _| stream.normal()))
}

/// Effective dictionary `A = Φ Ψ` with its cached norms.
///
/// `col_norms[i] = ‖a_i‖₂`, and `atom_norms(i, j) = col_norms[i] * col_norms[j]`
/// is the Frobenius norm of the rank-1 atom `a_i a_jᵀ` (equivalently the ℓ2
/// norm of column `n i + j` of `A ⊗ A`).
#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary {
    a: DenseMatrix,
    col_norms: DenseVector,
    atom_norms: DenseMatrix,
}

impl Dictionary {
    /// Wraps an effective dictionary directly and computes its norms.
    pub fn from_matrix(a: DenseMatrix) -> Self {
        let col_norms = column_norms(&a);
        let n = a.cols();
        let atom_norms = DenseMatrix::from_fn(n, n, |i, j| col_norms[i] * col_norms[j]);
        Self {
            a,
            col_norms,
            atom_norms,
        }
    }

    /// `A` (`m × n`).
    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn col_norms(&self) -> &DenseVector {
        &self.col_norms
    }

    /// `P`, the `n × n` matrix of 2D atom norms.
    pub fn atom_norms(&self) -> &DenseMatrix {
        &self.atom_norms
    }

    /// Number of measurements per side.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Signal side length.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Column `i` (0-based) of `A` as a contiguous vector.
    pub fn atom_column(&self, i: usize) -> DenseVector {
        self.a.column(i)
    }

    /// Writes `A` in the text matrix format.
    pub fn save(&self, path: &Path) -> Result<()> {
        linalg::text::write_matrix(path, &self.a)
    }

    /// Reads `A` and recomputes the norms.
    pub fn load(path: &Path) -> Result<Self> {
        linalg::text::read_matrix(path).map(Self::from_matrix)
    }
}

/// `A = Φ Ψ` plus cached norms.
pub fn build_dictionary(phi: &DenseMatrix, psi: &DenseMatrix) -> Result<Dictionary> {
    if psi.rows() != psi.cols() || phi.cols() != psi.rows() {
        return Err(Error::shape("build_dictionary", phi.shape(), psi.shape()));
    }
    Ok(Dictionary::from_matrix(matmul(phi, psi)?))
}

/// Bytes needed to hold `Ω = A ⊗ A` for an `m × n` dictionary.
pub fn omega_bytes(m: usize, n: usize) -> u128 {
    let (m, n) = (m as u128, n as u128);
    m * m * n * n * std::mem::size_of::<f64>() as u128
}

/// Explicit 1D dictionary `Ω = A ⊗ A` (`m² × n²`). Column `n i + j` (0-based)
/// is the stretched atom `a_i a_jᵀ`.
///
/// This is the 1D path's `O(m² n²)` memory cost; when `memory_cap_bytes` is
/// given, larger allocations are refused with the required byte count.
pub fn build_omega(dict: &Dictionary, memory_cap_bytes: Option<u64>) -> Result<DenseMatrix> {
    let required = omega_bytes(dict.m(), dict.n());
    if let Some(cap) = memory_cap_bytes {
        if required > cap as u128 {
            return Err(Error::MemoryCap {
                required_bytes: required,
                cap_bytes: cap as u128,
            });
        }
    }
    kron_shape(dict.matrix().shape(), dict.matrix().shape())?;
    linalg::kron(dict.matrix(), dict.matrix())
}

/// `Y = A Z Aᵀ` as two rectangular products; never touches `Ω`.
pub fn sample_separable(dict: &Dictionary, z: &DenseMatrix) -> Result<DenseMatrix> {
    let n = dict.n();
    if z.shape() != (n, n) {
        return Err(Error::shape("sample_separable", dict.matrix().shape(), z.shape()));
    }
    let az = matmul(dict.matrix(), z)?;
    matmul_nt(&az, dict.matrix())
}
