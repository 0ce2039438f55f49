use super::{AtomPair, Omp1dResult, Omp2dResult};

/// Agreement tolerance between the 1D and 2D paths.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// `|a − b| ≤ tol · max(|a|, |b|, scale)`.
///
/// `scale` is the magnitude below which differences are judged absolutely;
/// residual norms that both collapse to rounding noise (exact recovery) would
/// otherwise never compare equal in relative terms.
pub fn values_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}

/// Outcome of comparing a 1D run with a 2D run on the same instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    Equivalent,
    SelectionDiffers { iteration: usize, flat_1d: Option<usize>, flat_2d: Option<usize> },
    WeightDiffers { index: usize, w_1d: f64, w_2d: f64 },
    ResidualDiffers { iteration: usize, r_1d: f64, r_2d: f64 },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

impl std::fmt::Display for Equivalence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Equivalence::Equivalent => write!(f, "equivalent"),
            Equivalence::SelectionDiffers { iteration, flat_1d, flat_2d } => write!(
                f,
                "selection differs at iteration {}: 1d {:?} vs 2d {:?}",
                iteration + 1,
                flat_1d,
                flat_2d
            ),
            Equivalence::WeightDiffers { index, w_1d, w_2d } => {
                write!(f, "weight {} differs: {w_1d:e} vs {w_2d:e}", index + 1)
            }
            Equivalence::ResidualDiffers { iteration, r_1d, r_2d } => write!(
                f,
                "residual norm at iteration {} differs: {r_1d:e} vs {r_2d:e}",
                iteration + 1
            ),
        }
    }
}

/// Checks that two runs selected the same atoms under `(i, j) ↔ n (i − 1) + j`
/// and agree on weights and residual-norm histories within `tol`.
///
/// Weights are compared relative to `max(|w|, 1)`; residual norms relative
/// to `max(|r|, ‖y‖)` where `y_norm` is the norm of the shared input.
pub fn compare(
    one: &Omp1dResult,
    two: &Omp2dResult,
    n: usize,
    y_norm: f64,
    tol: f64,
) -> Equivalence {
    let flats_2d: Vec<usize> = two.selected.iter().map(|a: &AtomPair| a.flat(n)).collect();
    let len = one.selected.len().max(flats_2d.len());
    for t in 0..len {
        let (a, b) = (one.selected.get(t).copied(), flats_2d.get(t).copied());
        if a != b {
            return Equivalence::SelectionDiffers { iteration: t, flat_1d: a, flat_2d: b };
        }
    }
    for (idx, (&a, &b)) in one.weights.as_slice().iter().zip(two.weights.as_slice()).enumerate() {
        if !values_close(a, b, tol, 1.0) {
            return Equivalence::WeightDiffers { index: idx, w_1d: a, w_2d: b };
        }
    }
    let hist = one.residual_norms.len().max(two.residual_norms.len());
    for t in 0..hist {
        let (a, b) = (
            one.residual_norms.get(t).copied().unwrap_or(f64::NAN),
            two.residual_norms.get(t).copied().unwrap_or(f64::NAN),
        );
        if !values_close(a, b, tol, y_norm) {
            return Equivalence::ResidualDiffers { iteration: t, r_1d: a, r_2d: b };
        }
    }
    Equivalence::Equivalent
}
