//! Timing harness: runs both decoders on shared instances, checks that they
//! agree, and aggregates per-cell speedups.
//!
//! Timing protocol: every timed run is preceded by one untimed warm-up run on
//! the same instance. Times come from [`std::time::Instant`] (monotonic,
//! nanosecond resolution on Linux). Building `Ω` and `ρ` happens before the
//! 1D clock starts: the 1D decoder receives the explicit dictionary as input.

mod report;

pub mod cli;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

pub use report::{emit_csv, SUMMARY_HEADER, TRIALS_HEADER};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, stretch, DenseMatrix, DenseVector};
use crate::recovery::{
    self, omega_atom_norms, omp1d, omp2d, Omp1dResult, Omp2dResult, OmpConfig, PartialRecovery,
    EQUIVALENCE_TOLERANCE,
};
use crate::sensing::{build_omega, RngSeed};
use crate::signalgen::{make_instance, Instance};

/// Which decoders a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    OneD,
    TwoD,
    Both,
}

impl Algo {
    pub fn runs_1d(self) -> bool {
        matches!(self, Algo::OneD | Algo::Both)
    }

    pub fn runs_2d(self) -> bool {
        matches!(self, Algo::TwoD | Algo::Both)
    }
}

/// The decoder a record was measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgoKind {
    OneD,
    TwoD,
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgoKind::OneD => "1d",
            AlgoKind::TwoD => "2d",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub m_list: Vec<usize>,
    /// Inclusive sparsity range.
    pub k_min: usize,
    pub k_max: usize,
    pub trials: usize,
    pub seed: RngSeed,
    pub algo: Algo,
    pub tol: f64,
    pub check_equivalence: bool,
    /// Output prefix; files are `<out>.trials.csv` and `<out>.summary.csv`.
    pub out_path: std::path::PathBuf,
    pub memory_cap_bytes: u64,
    /// Run trials on a thread pool without warm-ups. Timings from such a run
    /// share caches and cores and are not comparable.
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 128,
            m_list: vec![16, 32],
            k_min: 8,
            k_max: 16,
            trials: 100,
            seed: RngSeed(0),
            algo: Algo::Both,
            tol: recovery::DEFAULT_TOL,
            check_equivalence: true,
            out_path: "sweep".into(),
            memory_cap_bytes: 2 << 30,
            parallel: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.m_list.is_empty() {
            return bad("at least one m is required".into());
        }
        if let Some(&m) = self.m_list.iter().find(|&&m| m == 0 || m > self.n) {
            return bad(format!("m={m} must satisfy 1 <= m <= n={}", self.n));
        }
        if self.k_min > self.k_max {
            return bad(format!(
                "empty sparsity range: k-min {} > k-max {}",
                self.k_min, self.k_max
            ));
        }
        if self.k_min == 0 || self.k_max > self.n * self.n {
            return bad(format!(
                "sparsity range {}..={} must lie within 1..={}",
                self.k_min,
                self.k_max,
                self.n * self.n
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !self.tol.is_finite() || self.tol < 0.0 {
            return bad(format!("tolerance must be finite and non-negative, got {}", self.tol));
        }
        Ok(())
    }

    /// Seed of the instance for one trial cell.
    pub fn trial_seed(&self, n: usize, m: usize, k: usize, trial: usize) -> RngSeed {
        self.seed.derive_all(&[n as u64, m as u64, k as u64, trial as u64])
    }
}

/// One decoder run on one trial instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub trial_index: usize,
    pub algo: AlgoKind,
    pub wall_time_ns: u64,
    pub project_flops: u64,
    pub weights_flops: u64,
    pub residual_flops: u64,
    pub iterations: usize,
    /// Final residual norm over `‖Y‖`.
    pub final_residual_rel: f64,
    /// `‖Z̃ − Z‖_F / ‖Z‖_F`.
    pub recovery_error_rel: f64,
    /// Present when both decoders ran with equivalence checking on.
    pub equivalent: Option<bool>,
    /// Selected atoms as 1-based flat indices `n (i − 1) + j`.
    pub selected_flat: Vec<usize>,
    /// Set when the decoder aborted on a degenerate atom set.
    pub aborted: Option<String>,
}

/// Records of one trial, plus the reason the 1D decoder was skipped if it was.
#[derive(Clone, Debug, Default)]
pub struct TrialRun {
    pub records: Vec<BenchRecord>,
    pub skipped_1d: Option<String>,
}

/// Per-cell aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub trials: usize,
    pub mean_time_1d_ns: Option<f64>,
    pub mean_time_2d_ns: Option<f64>,
    /// Total 1D time over total 2D time.
    pub speedup: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
    /// `(m, k, trial, reason)` of every trial whose 1D run was skipped.
    pub skipped_1d: Vec<(usize, usize, usize, String)>,
}

impl SweepReport {
    /// Number of trials where the decoders disagreed.
    pub fn equivalence_failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.algo == AlgoKind::TwoD && r.equivalent == Some(false))
            .count()
    }
}

enum Outcome<T> {
    Done(T),
    Aborted(Box<PartialRecovery>, String),
}

fn run_timed<T>(warm_up: bool, mut f: impl FnMut() -> Result<T>) -> Result<(Outcome<T>, u64)> {
    let classify = |r: Result<T>| match r {
        Ok(v) => Ok(Outcome::Done(v)),
        Err(Error::RecoveryAborted { partial, source }) => {
            Ok(Outcome::Aborted(partial, source.to_string()))
        }
        Err(e) => Err(e),
    };
    if warm_up {
        std::hint::black_box(f().ok());
    }
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed().as_nanos().max(1);
    Ok((classify(out)?, u64::try_from(elapsed).unwrap_or(u64::MAX)))
}

fn relative_error(estimate: &[f64], truth: &DenseMatrix) -> f64 {
    let diff: f64 = estimate
        .iter()
        .zip(truth.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm = frobenius_norm(truth);
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

struct RunSummary {
    selected_flat: Vec<usize>,
    coefficients: Vec<f64>,
    flops: recovery::FlopCounts,
    iterations: usize,
    final_residual: f64,
    weights: DenseVector,
    residual_norms: Vec<f64>,
    aborted: Option<String>,
}

fn summarize_partial(p: &PartialRecovery, n: usize, y_norm: f64, reason: String) -> RunSummary {
    let mut coefficients = vec![0.0; n * n];
    for (&flat, &u) in p.selected_flat.iter().zip(p.weights.as_slice()) {
        coefficients[flat - 1] = u;
    }
    RunSummary {
        selected_flat: p.selected_flat.clone(),
        coefficients,
        flops: p.flops,
        iterations: p.iterations,
        final_residual: p.residual_norms.last().copied().unwrap_or(y_norm),
        weights: p.weights.clone(),
        residual_norms: p.residual_norms.clone(),
        aborted: Some(reason),
    }
}

fn from_1d(r: Omp1dResult, y_norm: f64) -> RunSummary {
    RunSummary {
        final_residual: r.residual_norms.last().copied().unwrap_or(y_norm),
        selected_flat: r.selected,
        coefficients: r.coefficients.into_vec(),
        flops: r.flops,
        iterations: r.iterations,
        weights: r.weights,
        residual_norms: r.residual_norms,
        aborted: None,
    }
}

fn from_2d(r: Omp2dResult, n: usize, y_norm: f64) -> RunSummary {
    RunSummary {
        final_residual: r.residual_norms.last().copied().unwrap_or(y_norm),
        selected_flat: r.selected.iter().map(|a| a.flat(n)).collect(),
        coefficients: r.coefficients.into_vec(),
        flops: r.flops,
        iterations: r.iterations,
        weights: r.weights,
        residual_norms: r.residual_norms,
        aborted: None,
    }
}

fn runs_agree(a: &RunSummary, b: &RunSummary, y_norm: f64) -> bool {
    let close = |x: f64, y: f64, scale: f64| {
        recovery::values_close(x, y, EQUIVALENCE_TOLERANCE, scale)
    };
    a.aborted.is_some() == b.aborted.is_some()
        && a.selected_flat == b.selected_flat
        && a.weights.len() == b.weights.len()
        && a.residual_norms.len() == b.residual_norms.len()
        && a
            .weights
            .as_slice()
            .iter()
            .zip(b.weights.as_slice())
            .all(|(&x, &y)| close(x, y, 1.0))
        && a
            .residual_norms
            .iter()
            .zip(&b.residual_norms)
            .all(|(&x, &y)| close(x, y, y_norm))
}

/// Runs the configured decoders on trial `trial_index` of cell `(n, m, k)`.
pub fn run_trial(
    n: usize,
    m: usize,
    k: usize,
    trial_index: usize,
    cfg: &SweepConfig,
) -> Result<TrialRun> {
    let instance = make_instance(n, m, k, cfg.trial_seed(n, m, k, trial_index), false)?;
    run_trial_on(&instance, trial_index, cfg)
}

/// [`run_trial`] on a prepared instance.
pub fn run_trial_on(instance: &Instance, trial_index: usize, cfg: &SweepConfig) -> Result<TrialRun> {
    let (n, m, k) = (instance.config.n, instance.config.m, instance.config.k);
    let omp_cfg = OmpConfig::new(k).with_tol(cfg.tol);
    let y_norm = frobenius_norm(&instance.y);
    let warm_up = !cfg.parallel;
    let z_true = instance.z_true.to_dense();

    let mut out = TrialRun::default();
    let mut runs: Vec<(AlgoKind, RunSummary, u64)> = Vec::new();

    if cfg.algo.runs_1d() {
        match build_omega(&instance.dict, Some(cfg.memory_cap_bytes)) {
            Ok(omega) => {
                let rho = omega_atom_norms(&omega);
                let y = stretch(&instance.y);
                let (outcome, ns) = run_timed(warm_up, || omp1d(&omega, &rho, &y, &omp_cfg))?;
                let summary = match outcome {
                    Outcome::Done(r) => from_1d(r, y_norm),
                    Outcome::Aborted(p, why) => summarize_partial(&p, n, y_norm, why),
                };
                runs.push((AlgoKind::OneD, summary, ns));
            }
            Err(Error::MemoryCap { required_bytes, cap_bytes }) => {
                out.skipped_1d = Some(format!(
                    "Omega needs {required_bytes} bytes, cap is {cap_bytes}"
                ));
            }
            Err(e) => return Err(e),
        }
    }
    if cfg.algo.runs_2d() {
        let (outcome, ns) = run_timed(warm_up, || omp2d(&instance.dict, &instance.y, &omp_cfg))?;
        let summary = match outcome {
            Outcome::Done(r) => from_2d(r, n, y_norm),
            Outcome::Aborted(p, why) => summarize_partial(&p, n, y_norm, why),
        };
        runs.push((AlgoKind::TwoD, summary, ns));
    }

    let equivalent = (cfg.check_equivalence && runs.len() == 2)
        .then(|| runs_agree(&runs[0].1, &runs[1].1, y_norm));

    for (algo, s, ns) in runs {
        out.records.push(BenchRecord {
            n,
            m,
            k,
            trial_index,
            algo,
            wall_time_ns: ns,
            project_flops: s.flops.project,
            weights_flops: s.flops.weights,
            residual_flops: s.flops.residual,
            iterations: s.iterations,
            final_residual_rel: if y_norm > 0.0 { s.final_residual / y_norm } else { 0.0 },
            recovery_error_rel: relative_error(&s.coefficients, &z_true),
            equivalent,
            selected_flat: s.selected_flat,
            aborted: s.aborted,
        });
    }
    Ok(out)
}

/// Mean times and ratio-of-totals speedup per `(n, m, k)` cell, sorted.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    #[derive(Default)]
    struct Cell {
        trials: std::collections::BTreeSet<usize>,
        t1: (u128, usize),
        t2: (u128, usize),
    }
    let mut cells: BTreeMap<(usize, usize, usize), Cell> = BTreeMap::new();
    for r in records {
        let cell = cells.entry((r.m, r.k, r.n)).or_default();
        cell.trials.insert(r.trial_index);
        let acc = match r.algo {
            AlgoKind::OneD => &mut cell.t1,
            AlgoKind::TwoD => &mut cell.t2,
        };
        acc.0 += r.wall_time_ns as u128;
        acc.1 += 1;
    }
    cells
        .into_iter()
        .map(|((m, k, n), c)| {
            let mean = |(total, count): (u128, usize)| {
                (count > 0).then(|| total as f64 / count as f64)
            };
            let (mean1, mean2) = (mean(c.t1), mean(c.t2));
            let speedup = match (mean1, mean2) {
                (Some(a), Some(b)) if b > 0.0 => Some(a / b),
                _ => None,
            };
            SummaryRow {
                n,
                m,
                k,
                trials: c.trials.len(),
                mean_time_1d_ns: mean1,
                mean_time_2d_ns: mean2,
                speedup,
            }
        })
        .collect()
}

/// Runs every `(m, k, trial)` cell of the sweep. Sequential unless
/// `cfg.parallel`; per-trial failures are reported, never fatal.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    run_sweep_with_progress(cfg, |_| {})
}

/// [`run_sweep`] calling `progress` after each completed `(m, k)` cell.
pub fn run_sweep_with_progress(
    cfg: &SweepConfig,
    mut progress: impl FnMut(&SummaryRow),
) -> Result<SweepReport> {
    cfg.validate()?;
    let mut report = SweepReport::default();
    for &m in &cfg.m_list {
        for k in cfg.k_min..=cfg.k_max {
            let trial = |t: usize| (t, run_trial(cfg.n, m, k, t, cfg));
            let results: Vec<(usize, Result<TrialRun>)> = if cfg.parallel {
                (0..cfg.trials).into_par_iter().map(trial).collect()
            } else {
                (0..cfg.trials).map(trial).collect()
            };
            let mut cell_records = Vec::new();
            for (t, res) in results {
                match res {
                    Ok(run) => {
                        if let Some(reason) = run.skipped_1d {
                            report.skipped_1d.push((m, k, t, reason));
                        }
                        cell_records.extend(run.records);
                    }
                    Err(e) => report.skipped_1d.push((m, k, t, format!("trial failed: {e}"))),
                }
            }
            if let Some(row) = summarize(&cell_records).into_iter().next() {
                progress(&row);
            }
            report.records.extend(cell_records);
        }
    }
    report.summary = summarize(&report.records);
    Ok(report)
}
