//! Command-line front end of the `ompx` binary.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when an
//! equivalence check fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::{emit_csv, run_sweep_with_progress, Algo, SweepConfig};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, stretch};
use crate::recovery::{self, compare, omega_atom_norms, omp1d, omp2d, OmpConfig};
use crate::sensing::RngSeed;
use crate::signalgen::{make_instance, save_instance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_EQUIVALENT: i32 = 2;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "OMPX_SEED";

#[derive(Parser, Debug)]
#[command(name = "ompx", version, about = "1D vs 2D orthogonal matching pursuit benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
    Both,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::OneD => Algo::OneD,
            AlgoArg::TwoD => Algo::TwoD,
            AlgoArg::Both => Algo::Both,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time both decoders over a grid of (m, k) cells and write CSV tables.
    Sweep {
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Number of measurements per side; repeat for several values.
        #[arg(long = "m", default_values_t = [16, 32])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        k_min: usize,
        #[arg(long, default_value_t = 16)]
        k_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AlgoArg::Both)]
        algo: AlgoArg,
        #[arg(long, default_value_t = recovery::DEFAULT_TOL)]
        tol: f64,
        /// Compare the two decoders on every trial; exit 2 on any mismatch.
        #[arg(long)]
        check_equivalence: bool,
        /// Output prefix for `<out>.trials.csv` and `<out>.summary.csv`.
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
        /// Largest explicit 1D dictionary to allocate, in MiB.
        #[arg(long, default_value_t = 2048)]
        memory_cap_mb: u64,
        /// Run trials concurrently, without warm-ups. Timings are not comparable.
        #[arg(long)]
        parallel: bool,
    },
    /// Check 1D/2D equivalence on random instances.
    Verify {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = recovery::DEFAULT_TOL)]
        tol: f64,
    },
    /// Generate one instance and write it to a directory.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn seed_override(flag: u64, env: Option<OsString>) -> Result<u64> {
    match env {
        None => Ok(flag),
        Some(v) => v
            .to_str()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| {
                Error::InvalidArgument(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
            }),
    }
}

/// Parses `args` (including the program name) and runs the command. The seed
/// override is read from `env_seed` rather than the process environment.
pub fn run<I, T>(
    args: I,
    env_seed: Option<OsString>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, env_seed, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(
        std::env::args_os(),
        std::env::var_os(SEED_ENV),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

fn execute(
    command: Command,
    env_seed: Option<OsString>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let io = |e| Error::io("<stdout>", e);
    match command {
        Command::Sweep {
            n,
            m,
            k_min,
            k_max,
            trials,
            seed,
            algo,
            tol,
            check_equivalence,
            out,
            memory_cap_mb,
            parallel,
        } => {
            let cfg = SweepConfig {
                n,
                m_list: m,
                k_min,
                k_max,
                trials,
                seed: RngSeed(seed_override(seed, env_seed)?),
                algo: algo.into(),
                tol,
                check_equivalence,
                out_path: out,
                memory_cap_bytes: memory_cap_mb.saturating_mul(1 << 20),
                parallel,
            };
            cfg.validate()?;
            if cfg.parallel {
                writeln!(stderr, "note: --parallel run; wall times are not comparable")
                    .map_err(io)?;
            }
            let report = run_sweep_with_progress(&cfg, |row| {
                let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3e}"));
                let _ = writeln!(
                    stderr,
                    "n={} m={} k={} trials={} t1d={} t2d={} speedup={}",
                    row.n,
                    row.m,
                    row.k,
                    row.trials,
                    fmt(row.mean_time_1d_ns),
                    fmt(row.mean_time_2d_ns),
                    fmt(row.speedup)
                );
            })?;
            for (m, k, trial, reason) in &report.skipped_1d {
                writeln!(stderr, "skipped 1d: m={m} k={k} trial={trial}: {reason}").map_err(io)?;
            }
            let (tp, sp) = emit_csv(&report.records, &report.summary, &cfg.out_path)?;
            writeln!(stdout, "wrote {}", tp.display()).map_err(io)?;
            writeln!(stdout, "wrote {}", sp.display()).map_err(io)?;
            let failures = report.equivalence_failures();
            if cfg.check_equivalence && failures > 0 {
                writeln!(stderr, "equivalence check failed on {failures} trial(s)").map_err(io)?;
                return Ok(EXIT_NOT_EQUIVALENT);
            }
            Ok(EXIT_OK)
        }
        Command::Verify { n, m, k, trials, seed, tol } => {
            let seed = RngSeed(seed_override(seed, env_seed)?);
            let cfg = OmpConfig::new(k).with_tol(tol);
            let mut agreed = 0;
            for trial in 0..trials {
                let instance = make_instance(
                    n,
                    m,
                    k,
                    seed.derive_all(&[n as u64, m as u64, k as u64, trial as u64]),
                    true,
                )?;
                let omega = instance.omega.as_ref().expect("requested with_omega");
                let rho = omega_atom_norms(omega);
                let one = omp1d(omega, &rho, &stretch(&instance.y), &cfg)?;
                let two = omp2d(&instance.dict, &instance.y, &cfg)?;
                let verdict = compare(
                    &one,
                    &two,
                    n,
                    frobenius_norm(&instance.y),
                    recovery::EQUIVALENCE_TOLERANCE,
                );
                if verdict.holds() {
                    agreed += 1;
                } else {
                    writeln!(stderr, "trial {trial}: {verdict}").map_err(io)?;
                }
            }
            let pass = agreed == trials;
            writeln!(
                stdout,
                "{} n={n} m={m} k={k}: {agreed}/{trials} trials equivalent",
                if pass { "PASS" } else { "FAIL" }
            )
            .map_err(io)?;
            Ok(if pass { EXIT_OK } else { EXIT_NOT_EQUIVALENT })
        }
        Command::Gen { n, m, k, seed, out } => {
            let seed = RngSeed(seed_override(seed, env_seed)?);
            let instance = make_instance(n, m, k, seed, false)?;
            save_instance(&instance, &out)?;
            writeln!(stdout, "wrote {}", out.display()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_seed_override() {
        assert_eq!(seed_override(5, None).unwrap(), 5);
        assert_eq!(seed_override(5, Some("17".into())).unwrap(), 17);
        assert!(seed_override(5, Some("x".into())).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["ompx", "sweep", "--algo", "3d"], None, &mut out, &mut err);
        assert_eq!(code, EXIT_USAGE);
        let code = run(
            ["ompx", "sweep", "--k-min", "9", "--k-max", "8"],
            None,
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_USAGE);
        assert!(String::from_utf8_lossy(&err).contains("k-min"));
    }
}
