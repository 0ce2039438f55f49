use super::{
    argmax_available, AtomPair, FlopCounts, Omp2dResult, OmpConfig, PartialRecovery, Termination,
};
use crate::error::{Error, Result};
use crate::linalg::{
    axpy, dot, frobenius_norm, matmul_into, matmul_tn_into, solve_spd, solve_spd_flops, DenseMatrix,
    DenseVector,
};
use crate::sensing::Dictionary;

/// Normalized 2D projections `Aᵀ R A ./ P`: entry `(i, j)` is
/// `a_iᵀ R a_j / (‖a_i‖ ‖a_j‖)`, 0 where the atom norm vanishes.
pub fn project_2d(dict: &Dictionary, r: &DenseMatrix) -> Result<DenseMatrix> {
    let m = dict.m();
    if r.shape() != (m, m) {
        return Err(Error::shape("project_2d", dict.matrix().shape(), r.shape()));
    }
    let mut tmp = DenseMatrix::zeros(dict.n(), m);
    let mut out = DenseMatrix::zeros(dict.n(), dict.n());
    project_2d_into(dict, r, &mut tmp, &mut out);
    Ok(out)
}

// `tmp` is n × m, `out` is n × n.
fn project_2d_into(dict: &Dictionary, r: &DenseMatrix, tmp: &mut DenseMatrix, out: &mut DenseMatrix) {
    matmul_tn_into(dict.matrix(), r, tmp);
    matmul_into(tmp, dict.matrix(), out);
    for (o, &p) in out.as_mut_slice().iter_mut().zip(dict.atom_norms().as_slice()) {
        *o = if p > 0.0 { *o / p } else { 0.0 };
    }
}

fn projection_flops(m: usize, n: usize) -> u64 {
    // (n×m)(m×m) then (n×m)(m×n)
    (n * m * m + n * n * m) as u64
}

/// Normal equations `H u = f` for a growing set of 2D atoms, built without
/// forming any atom:
///
/// * `H(t, s) = ⟨a_{i_t}, a_{i_s}⟩ ⟨a_{j_t}, a_{j_s}⟩`, `O(m)` per entry;
/// * `f(t) = a_{i_t}ᵀ Y a_{j_t}`, `O(m²)` per entry.
///
/// Appending an atom computes one new row of `H` and one entry of `f`;
/// existing entries are never touched.
pub struct NormalSystem2d<'a> {
    y: &'a DenseMatrix,
    /// `Aᵀ`: row `i` is column `a_i` of `A`, contiguous.
    atoms_t: DenseMatrix,
    selected: Vec<AtomPair>,
    /// Lower triangle of `H`, row `t` holding `H(t, 0..=t)`.
    h_rows: Vec<Vec<f64>>,
    f: Vec<f64>,
    y_times_col: Vec<f64>,
}

impl<'a> NormalSystem2d<'a> {
    pub fn new(dict: &Dictionary, y: &'a DenseMatrix) -> Result<Self> {
        let m = dict.m();
        if y.shape() != (m, m) {
            return Err(Error::shape("normal system", dict.matrix().shape(), y.shape()));
        }
        Ok(Self {
            y,
            atoms_t: dict.matrix().transpose(),
            selected: Vec::new(),
            h_rows: Vec::new(),
            f: Vec::new(),
            y_times_col: vec![0.0; m],
        })
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn selected(&self) -> &[AtomPair] {
        &self.selected
    }

    /// Column `a_i` (0-based `i`).
    fn col(&self, i: usize) -> &[f64] {
        self.atoms_t.row(i)
    }

    /// Appends an atom (1-based coordinates) and returns the multiply-adds spent.
    pub fn push(&mut self, atom: AtomPair) -> Result<u64> {
        let n = self.atoms_t.rows();
        let m = self.atoms_t.cols();
        if atom.row == 0 || atom.row > n || atom.col == 0 || atom.col > n {
            return Err(Error::InvalidArgument(format!(
                "atom ({}, {}) outside 1..={n}",
                atom.row, atom.col
            )));
        }
        if self.selected.contains(&atom) {
            return Err(Error::InvalidArgument(format!(
                "atom ({}, {}) selected twice",
                atom.row, atom.col
            )));
        }
        let (i, j) = (atom.row - 1, atom.col - 1);
        let mut row = Vec::with_capacity(self.selected.len() + 1);
        for prev in self.selected.iter().chain(std::iter::once(&atom)) {
            let (pi, pj) = (prev.row - 1, prev.col - 1);
            row.push(dot(self.col(i), self.col(pi)) * dot(self.col(j), self.col(pj)));
        }

        // f = a_iᵀ (Y a_j)
        let a_j = self.atoms_t.row(j);
        for (out, r) in self.y_times_col.iter_mut().zip(0..m) {
            *out = dot(self.y.row(r), a_j);
        }
        let f = dot(self.col(i), &self.y_times_col);

        let flops = (2 * m * row.len() + m * m + m) as u64;
        self.h_rows.push(row);
        self.f.push(f);
        self.selected.push(atom);
        Ok(flops)
    }

    /// Full symmetric `H` (`t × t`).
    ///
    /// # Panics
    /// If no atom has been pushed.
    pub fn h(&self) -> DenseMatrix {
        let t = self.len();
        DenseMatrix::from_fn(t, t, |r, c| {
            if c <= r {
                self.h_rows[r][c]
            } else {
                self.h_rows[c][r]
            }
        })
    }

    pub fn f(&self) -> DenseVector {
        DenseVector::from(self.f.clone())
    }

    /// `Y − Σ u_t a_{i_t} a_{j_t}ᵀ`, written into `out`.
    fn residual_into(&self, weights: &DenseVector, out: &mut DenseMatrix) {
        let m = self.atoms_t.cols();
        out.as_mut_slice().copy_from_slice(self.y.as_slice());
        for (atom, &u) in self.selected.iter().zip(weights.as_slice()) {
            let a_i = self.col(atom.row - 1);
            let a_j = self.col(atom.col - 1);
            for (p, &a_pi) in a_i.iter().enumerate() {
                axpy(-u * a_pi, a_j, &mut out.as_mut_slice()[p * m..(p + 1) * m]);
            }
        }
    }
}

/// `H` and `f` for the given (distinct, 1-based) atoms.
pub fn build_normal_system_2d(
    dict: &Dictionary,
    y: &DenseMatrix,
    selected: &[AtomPair],
) -> Result<(DenseMatrix, DenseVector)> {
    if selected.is_empty() {
        return Err(Error::InvalidArgument("no atoms selected".into()));
    }
    let mut sys = NormalSystem2d::new(dict, y)?;
    for &atom in selected {
        sys.push(atom)?;
    }
    Ok((sys.h(), sys.f()))
}

/// 2D orthogonal matching pursuit on the dictionary `A` and sample `Y`.
///
/// Each iteration picks the available atom maximizing
/// `|⟨R, B_{i,j}⟩| / ‖B_{i,j}‖` (ties to the smallest flat index
/// `n (i - 1) + j`), extends the normal equations by that atom, refits all
/// weights against `Y`, and recomputes `R = Y − Σ u B`. Works entirely on
/// `m × m`, `n × m` and `n × n` matrices.
pub fn omp2d(dict: &Dictionary, y: &DenseMatrix, cfg: &OmpConfig) -> Result<Omp2dResult> {
    let (m, n) = (dict.m(), dict.n());
    if y.shape() != (m, m) {
        return Err(Error::shape("omp2d", dict.matrix().shape(), y.shape()));
    }
    cfg.validate(n * n)?;

    let mut available: Vec<bool> = dict.atom_norms().as_slice().iter().map(|&p| p > 0.0).collect();
    let unusable_atoms: Vec<usize> = available
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();

    let stop_at = cfg.tol * frobenius_norm(y);
    let mut residual = y.clone();
    let mut residual_norm = frobenius_norm(&residual);
    let mut system = NormalSystem2d::new(dict, y)?;
    let mut weights = DenseVector::default();
    let mut residual_norms = Vec::with_capacity(cfg.k);
    let mut flops = FlopCounts::default();
    let mut termination = Termination::SparsityReached;
    let mut half = DenseMatrix::zeros(n, m);
    let mut scores = DenseMatrix::zeros(n, n);

    for _ in 0..cfg.k {
        if residual_norm <= stop_at {
            termination = Termination::ResidualBelowTolerance;
            break;
        }

        project_2d_into(dict, &residual, &mut half, &mut scores);
        flops.project += projection_flops(m, n);

        let Some(best) = argmax_available(scores.as_slice(), &available) else {
            termination = Termination::AtomsExhausted;
            break;
        };
        available[best] = false;
        let atom = AtomPair::from_flat(n, best + 1);

        flops.weights += system.push(atom)?;
        let size = system.len();
        flops.weights += solve_spd_flops(size);
        weights = match solve_spd(&system.h(), &system.f()) {
            Ok(u) => u,
            Err(e) => {
                return Err(Error::RecoveryAborted {
                    partial: Box::new(PartialRecovery {
                        selected_flat: system.selected().iter().map(|a| a.flat(n)).collect(),
                        weights,
                        iterations: residual_norms.len(),
                        residual_norms,
                        flops,
                    }),
                    source: Box::new(e),
                })
            }
        };

        system.residual_into(&weights, &mut residual);
        flops.residual += (size * (m * m + m)) as u64;

        residual_norm = frobenius_norm(&residual);
        residual_norms.push(residual_norm);
    }

    let mut coefficients = DenseMatrix::zeros(n, n);
    for (atom, &u) in system.selected().iter().zip(weights.as_slice()) {
        coefficients.set(atom.row - 1, atom.col - 1, u);
    }
    Ok(Omp2dResult {
        iterations: system.len(),
        selected: system.selected().to_vec(),
        weights,
        residual_norms,
        coefficients,
        flops,
        termination,
        unusable_atoms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;
    use crate::sensing::{dct_matrix, gaussian_matrix, RngSeed};

    fn orthonormal_dict() -> Dictionary {
        Dictionary::from_matrix(dct_matrix(4).unwrap())
    }

    fn atom(dict: &Dictionary, i: usize, j: usize) -> DenseMatrix {
        outer(&dict.atom_column(i - 1), &dict.atom_column(j - 1))
    }

    #[test]
    fn self_projection_is_atom_norm() {
        let d = orthonormal_dict();
        let p = project_2d(&d, &atom(&d, 2, 3)).unwrap();
        assert!((p.get(1, 2) - 1.0).abs() < 1e-14);
        let zero = project_2d(&d, &DenseMatrix::zeros(4, 4)).unwrap();
        assert!(zero.as_slice().iter().all(|&x| x == 0.0));
        assert!(project_2d(&d, &DenseMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn single_atom_normal_system() {
        let d = Dictionary::from_matrix(gaussian_matrix(3, 4, RngSeed(6)).unwrap());
        let y = gaussian_matrix(3, 3, RngSeed(7)).unwrap();
        let (h, f) = build_normal_system_2d(&d, &y, &[AtomPair::new(2, 4)]).unwrap();
        let (ai, aj) = (d.atom_column(1), d.atom_column(3));
        let expected_h = ai.dot(&ai).unwrap() * aj.dot(&aj).unwrap();
        assert!((h.get(0, 0) - expected_h).abs() <= 1e-14 * expected_h);
        let mut expected_f = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                expected_f += ai[p] * y.get(p, q) * aj[q];
            }
        }
        assert!((f[0] - expected_f).abs() <= 1e-13 * expected_f.abs().max(1.0));
    }

    #[test]
    fn orthonormal_disjoint_atoms_give_identity() {
        let d = orthonormal_dict();
        let y = DenseMatrix::identity(4);
        let (h, _) =
            build_normal_system_2d(&d, &y, &[AtomPair::new(1, 2), AtomPair::new(3, 4)]).unwrap();
        assert!(h.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn duplicates_rejected() {
        let d = orthonormal_dict();
        let y = DenseMatrix::identity(4);
        let dup = [AtomPair::new(1, 2), AtomPair::new(1, 2)];
        assert!(build_normal_system_2d(&d, &y, &dup).is_err());
        assert!(build_normal_system_2d(&d, &y, &[]).is_err());
        assert!(build_normal_system_2d(&d, &y, &[AtomPair::new(5, 1)]).is_err());
    }

    #[test]
    fn incremental_extension_is_bit_identical() {
        let d = Dictionary::from_matrix(gaussian_matrix(5, 9, RngSeed(10)).unwrap());
        let y = gaussian_matrix(5, 5, RngSeed(11)).unwrap();
        let atoms = [
            AtomPair::new(1, 1),
            AtomPair::new(4, 7),
            AtomPair::new(9, 2),
            AtomPair::new(3, 3),
        ];
        let mut sys = NormalSystem2d::new(&d, &y).unwrap();
        let mut before = Vec::new();
        for &a in &atoms {
            let flops = sys.push(a).unwrap();
            assert_eq!(flops, (2 * 5 * sys.len() + 25 + 5) as u64);
            before.push((sys.h(), sys.f()));
        }
        for (t, (h_t, f_t)) in before.iter().enumerate() {
            let (h_full, f_full) = (sys.h(), sys.f());
            for r in 0..=t {
                assert_eq!(f_t[r].to_bits(), f_full[r].to_bits());
                for c in 0..=t {
                    assert_eq!(h_t.get(r, c).to_bits(), h_full.get(r, c).to_bits());
                }
            }
        }
    }

    #[test]
    fn single_orthonormal_atom_recovery() {
        let d = orthonormal_dict();
        let mut y = atom(&d, 2, 3);
        y.scale(5.0);
        let res = omp2d(&d, &y, &OmpConfig::new(1)).unwrap();
        assert_eq!(res.selected, vec![AtomPair::new(2, 3)]);
        assert!((res.weights[0] - 5.0).abs() < 1e-12);
        assert!(res.residual_norms[0] < 1e-12);
        assert_eq!(res.coefficients.get(1, 2), res.weights[0]);
    }

    #[test]
    fn zero_sample_stops_immediately() {
        let d = Dictionary::from_matrix(gaussian_matrix(3, 5, RngSeed(1)).unwrap());
        let res = omp2d(&d, &DenseMatrix::zeros(3, 3), &OmpConfig::new(4)).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.coefficients, DenseMatrix::zeros(5, 5));
        assert_eq!(res.termination, Termination::ResidualBelowTolerance);
    }

    #[test]
    fn flop_counts_follow_the_model() {
        let (m, n, k) = (4, 10, 3);
        let d = Dictionary::from_matrix(gaussian_matrix(m, n, RngSeed(21)).unwrap());
        let y = gaussian_matrix(m, m, RngSeed(22)).unwrap();
        let res = omp2d(&d, &y, &OmpConfig::new(k)).unwrap();
        assert_eq!(res.iterations, k);
        assert_eq!(res.flops.project, (k * (n * m * m + n * n * m)) as u64);
        assert_eq!(res.flops.residual, ((1 + 2 + 3) * (m * m + m)) as u64);
    }

    #[test]
    fn rejects_bad_input() {
        let d = Dictionary::from_matrix(gaussian_matrix(3, 4, RngSeed(1)).unwrap());
        assert!(omp2d(&d, &DenseMatrix::zeros(4, 4), &OmpConfig::new(1)).is_err());
        assert!(omp2d(&d, &DenseMatrix::zeros(3, 3), &OmpConfig::new(17)).is_err());
    }
}
