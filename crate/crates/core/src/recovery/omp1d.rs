use super::{argmax_available, FlopCounts, Omp1dResult, OmpConfig, PartialRecovery, Termination};
use crate::error::{Error, Result};
use crate::linalg::{axpy, column_norms, dot, solve_spd, solve_spd_flops, DenseMatrix, DenseVector};

/// `ρ`: ℓ2 norm of every column of `Ω`.
pub fn omega_atom_norms(omega: &DenseMatrix) -> DenseVector {
    column_norms(omega)
}

/// Normalized projections `Ωᵀ r ./ ρ`. Entries with `ρ(i) == 0` are 0.
pub fn project_1d(omega: &DenseMatrix, r: &DenseVector, rho: &DenseVector) -> Result<DenseVector> {
    if omega.rows() != r.len() || omega.cols() != rho.len() {
        return Err(Error::shape("project_1d", omega.shape(), (r.len(), rho.len())));
    }
    let mut out = DenseVector::zeros(omega.cols());
    project_into(omega, r.as_slice(), rho.as_slice(), out.as_mut_slice());
    Ok(out)
}

fn project_into(omega: &DenseMatrix, r: &[f64], rho: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    // Row-streaming Ωᵀ r: one contiguous pass over Ω, four rows per sweep of
    // the accumulator.
    let quads = r.len() / 4;
    for q in 0..quads {
        let b = 4 * q;
        let (r0, r1, r2, r3) = (r[b], r[b + 1], r[b + 2], r[b + 3]);
        let n = out.len();
        let (w0, w1, w2, w3) = (
            &omega.row(b)[..n],
            &omega.row(b + 1)[..n],
            &omega.row(b + 2)[..n],
            &omega.row(b + 3)[..n],
        );
        for (c, o) in out.iter_mut().enumerate() {
            *o += r0 * w0[c] + r1 * w1[c] + r2 * w2[c] + r3 * w3[c];
        }
    }
    for (row, &r_i) in r.iter().enumerate().skip(4 * quads) {
        if r_i != 0.0 {
            axpy(r_i, omega.row(row), out);
        }
    }
    for (o, &p) in out.iter_mut().zip(rho) {
        *o = if p > 0.0 { *o / p } else { 0.0 };
    }
}

/// 1D orthogonal matching pursuit over the explicit dictionary `omega`
/// (`m² × n²`), atom norms `rho`, and stretched sample `y`.
///
/// Each iteration selects the available atom maximizing `|⟨r, ω_i⟩| / ρ(i)`
/// (ties to the smallest index), refits all weights against `y` by solving
/// `Q u = g` with `Q = Ω_Iᵀ Ω_I`, `g = Ω_Iᵀ y`, and recomputes
/// `r = y − Ω_I u`. Atoms with `ρ(i) == 0` are never selected.
pub fn omp1d(
    omega: &DenseMatrix,
    rho: &DenseVector,
    y: &DenseVector,
    cfg: &OmpConfig,
) -> Result<Omp1dResult> {
    let (rows, atoms) = omega.shape();
    if rho.len() != atoms || y.len() != rows {
        return Err(Error::shape("omp1d", omega.shape(), (y.len(), rho.len())));
    }
    cfg.validate(atoms)?;

    let mut available: Vec<bool> = rho.as_slice().iter().map(|&p| p > 0.0).collect();
    let unusable_atoms: Vec<usize> = available
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();

    let stop_at = cfg.tol * y.norm();
    let mut residual = y.clone();
    let mut residual_norm = residual.norm();
    let mut scores = vec![0.0; atoms];

    let mut selected: Vec<usize> = Vec::with_capacity(cfg.k);
    // Selected columns of Ω, gathered contiguously.
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(cfg.k);
    // Lower triangle of Q, row t holding Q(t, 0..=t).
    let mut gram_rows: Vec<Vec<f64>> = Vec::with_capacity(cfg.k);
    let mut g: Vec<f64> = Vec::with_capacity(cfg.k);
    let mut weights = DenseVector::default();
    let mut residual_norms = Vec::with_capacity(cfg.k);
    let mut flops = FlopCounts::default();
    let mut termination = Termination::SparsityReached;

    for _ in 0..cfg.k {
        if residual_norm <= stop_at {
            termination = Termination::ResidualBelowTolerance;
            break;
        }

        project_into(omega, residual.as_slice(), rho.as_slice(), &mut scores);
        flops.project += (rows * atoms) as u64;

        let Some(best) = argmax_available(&scores, &available) else {
            termination = Termination::AtomsExhausted;
            break;
        };
        available[best] = false;
        selected.push(best + 1);

        let col: Vec<f64> = (0..rows).map(|r| omega.get(r, best)).collect();
        let t = columns.len();
        let mut q_row: Vec<f64> = columns.iter().map(|c| dot(c, &col)).collect();
        q_row.push(dot(&col, &col));
        g.push(dot(&col, y.as_slice()));
        gram_rows.push(q_row);
        columns.push(col);
        let size = t + 1;
        flops.weights += ((size + 1) * rows) as u64 + solve_spd_flops(size);

        let q = DenseMatrix::from_fn(size, size, |i, j| {
            if j <= i {
                gram_rows[i][j]
            } else {
                gram_rows[j][i]
            }
        });
        weights = match solve_spd(&q, &DenseVector::from(g.clone())) {
            Ok(u) => u,
            Err(e) => {
                return Err(Error::RecoveryAborted {
                    partial: Box::new(PartialRecovery {
                        selected_flat: selected,
                        weights,
                        iterations: residual_norms.len(),
                        residual_norms,
                        flops,
                    }),
                    source: Box::new(e),
                })
            }
        };

        residual.as_mut_slice().copy_from_slice(y.as_slice());
        for (u, c) in weights.as_slice().iter().zip(&columns) {
            axpy(-u, c, residual.as_mut_slice());
        }
        flops.residual += (size * rows) as u64;

        residual_norm = residual.norm();
        residual_norms.push(residual_norm);
    }

    let mut coefficients = DenseVector::zeros(atoms);
    for (&idx, &u) in selected.iter().zip(weights.as_slice()) {
        coefficients[idx - 1] = u;
    }
    Ok(Omp1dResult {
        iterations: selected.len(),
        selected,
        weights,
        residual_norms,
        coefficients,
        flops,
        termination,
        unusable_atoms,
    })
}
