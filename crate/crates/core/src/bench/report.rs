use std::path::{Path, PathBuf};

use super::{BenchRecord, SummaryRow};
use crate::error::{Error, Result};

pub const TRIALS_HEADER: [&str; 13] = [
    "n",
    "m",
    "k",
    "trial",
    "algo",
    "wall_time_ns",
    "project_flops",
    "weights_flops",
    "residual_flops",
    "iterations",
    "final_residual_rel",
    "recovery_error_rel",
    "equivalent",
];

pub const SUMMARY_HEADER: [&str; 7] = [
    "n",
    "m",
    "k",
    "trials",
    "mean_time_1d_ns",
    "mean_time_2d_ns",
    "speedup",
];

// Thirteen significant digits.
fn real(x: f64) -> String {
    format!("{x:.12e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<out>.trials.csv` and `<out>.summary.csv`, returning both paths.
///
/// Trial rows are sorted by `(m, k, trial, algo)`; the 1D row of a trial
/// precedes its 2D row.
pub fn emit_csv(
    records: &[BenchRecord],
    summary: &[SummaryRow],
    out: &Path,
) -> Result<(PathBuf, PathBuf)> {
    let trials_path = with_suffix(out, ".trials.csv");
    let summary_path = with_suffix(out, ".summary.csv");
    if let Some(dir) = trials_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Csv { path: path.clone(), source }
    };

    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.m, r.k, r.trial_index, r.algo));
    let mut w = csv::Writer::from_path(&trials_path).map_err(csv_err(&trials_path))?;
    w.write_record(TRIALS_HEADER).map_err(csv_err(&trials_path))?;
    for r in sorted {
        let equivalent = match r.equivalent {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.trial_index.to_string(),
            r.algo.to_string(),
            r.wall_time_ns.to_string(),
            r.project_flops.to_string(),
            r.weights_flops.to_string(),
            r.residual_flops.to_string(),
            r.iterations.to_string(),
            real(r.final_residual_rel),
            real(r.recovery_error_rel),
            equivalent.to_string(),
        ])
        .map_err(csv_err(&trials_path))?;
    }
    w.flush().map_err(|e| Error::io(&trials_path, e))?;

    let mut rows: Vec<&SummaryRow> = summary.iter().collect();
    rows.sort_by_key(|r| (r.m, r.k));
    let mut w = csv::Writer::from_path(&summary_path).map_err(csv_err(&summary_path))?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(&summary_path))?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.trials.to_string(),
            opt_real(r.mean_time_1d_ns),
            opt_real(r.mean_time_2d_ns),
            opt_real(r.speedup),
        ])
        .map_err(csv_err(&summary_path))?;
    }
    w.flush().map_err(|e| Error::io(&summary_path, e))?;

    Ok((trials_path, summary_path))
}
