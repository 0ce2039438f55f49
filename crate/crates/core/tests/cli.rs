use std::path::Path;
use std::process::{Command, Output};

use ompx::bench::{emit_csv, SUMMARY_HEADER, TRIALS_HEADER};
use ompx::signalgen::load_instance;

fn ompx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ompx"))
        .args(args)
        .env_remove("OMPX_SEED")
        .output()
        .unwrap()
}

fn small_sweep(out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec![
        "sweep", "--n", "8", "--m", "2", "--m", "4", "--k-min", "1", "--k-max", "3", "--trials",
        "3", "--seed", "11", "--check-equivalence", "--out", out,
    ];
    args.extend_from_slice(extra);
    ompx(&args)
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn without_time_column(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(5);
            f.join(",")
        })
        .collect()
}

#[test]
fn sweep_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    let o = small_sweep(&out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let trials = read(dir.path().join("fig.trials.csv"));
    let mut lines = trials.lines();
    assert_eq!(lines.next().unwrap(), TRIALS_HEADER.join(","));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 3 * 3 * 2);
    assert!(rows.iter().all(|r| r[12] == "true"));
    assert!(rows.iter().all(|r| r[5].parse::<u64>().unwrap() > 0));
    let keys: Vec<(usize, usize, usize, &str)> = rows
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap(), r[4]))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    let summary = read(dir.path().join("fig.summary.csv"));
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), SUMMARY_HEADER.join(","));
    assert_eq!(lines.count(), 6);
}

#[test]
fn summary_speedup_recomputes_from_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    assert_eq!(small_sweep(&out, &[]).status.code(), Some(0));
    let trials = read(dir.path().join("r.trials.csv"));
    let summary = read(dir.path().join("r.summary.csv"));
    for row in summary.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        let (m, k) = (f[1], f[2]);
        let mean = |algo: &str| {
            let times: Vec<f64> = trials
                .lines()
                .skip(1)
                .map(|l| l.split(',').collect::<Vec<_>>())
                .filter(|r| r[1] == m && r[2] == k && r[4] == algo)
                .map(|r| r[5].parse::<f64>().unwrap())
                .collect();
            times.iter().sum::<f64>() / times.len() as f64
        };
        let expected = mean("1d") / mean("2d");
        let speedup: f64 = f[6].parse().unwrap();
        assert!((speedup - expected).abs() <= 1e-9 * expected, "{speedup} vs {expected}");
    }
}

#[test]
fn sweeps_are_deterministic_apart_from_time() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(small_sweep(&a, &[]).status.code(), Some(0));
    assert_eq!(small_sweep(&b, &[]).status.code(), Some(0));
    assert_eq!(
        without_time_column(&read(dir.path().join("a.trials.csv"))),
        without_time_column(&read(dir.path().join("b.trials.csv")))
    );
}

#[test]
fn parallel_mode_matches_sequential_apart_from_time() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(small_sweep(&a, &[]).status.code(), Some(0));
    let o = small_sweep(&b, &["--parallel"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not comparable"));
    assert_eq!(
        without_time_column(&read(dir.path().join("a.trials.csv"))),
        without_time_column(&read(dir.path().join("b.trials.csv")))
    );
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let run = |name: &str, seed: &str, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ompx"));
        cmd.args(["gen", "--n", "6", "--m", "3", "--k", "2", "--seed", seed, "--out"])
            .arg(out(name))
            .env_remove("OMPX_SEED");
        if let Some(v) = env {
            cmd.env("OMPX_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
        read(dir.path().join(name).join("spikes.csv"))
    };
    let flag = run("flag", "77", None);
    let env = run("env", "1", Some("77"));
    let other = run("other", "1", None);
    assert_eq!(flag, env);
    assert_ne!(flag, other);

    let bad = Command::new(env!("CARGO_BIN_EXE_ompx"))
        .args(["gen", "--n", "6", "--m", "3", "--k", "2", "--out"])
        .arg(out("bad"))
        .env("OMPX_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn gen_writes_a_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("inst");
    let o = ompx(&["gen", "--n", "8", "--m", "4", "--k", "3", "--seed", "5", "--out", target.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = load_instance(&target).unwrap();
    assert_eq!((inst.config.n, inst.config.m, inst.config.k), (8, 4, 3));
    assert!(inst.is_consistent(1e-12).unwrap());
}

#[test]
fn verify_passes_on_random_instances() {
    let o = ompx(&["verify", "--n", "16", "--m", "8", "--k", "4", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("PASS"), "{stdout}");
    assert!(stdout.contains("50/50"));
}

#[test]
fn usage_and_range_errors_exit_one() {
    let o = ompx(&["sweep", "--k-min", "9", "--k-max", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k-min"));

    let o = ompx(&["sweep", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let o = ompx(&["sweep", "--n", "8", "--m", "9"]);
    assert_eq!(o.status.code(), Some(1));

    let o = ompx(&[]);
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(ompx(&["--help"]).status.code(), Some(0));
}

#[test]
fn memory_cap_skips_one_d_and_keeps_two_d() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cap");
    let o = ompx(&[
        "sweep", "--n", "64", "--m", "16", "--k-min", "2", "--k-max", "2", "--trials", "1",
        "--memory-cap-mb", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped 1d"));
    let trials = read(dir.path().join("cap.trials.csv"));
    let rows: Vec<&str> = trials.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains(",2d,"));
    let summary = read(dir.path().join("cap.summary.csv"));
    assert!(summary.lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn empty_record_list_gives_header_only_files() {
    let dir = tempfile::tempdir().unwrap();
    let (t, s) = emit_csv(&[], &[], &dir.path().join("empty")).unwrap();
    assert_eq!(read(t), format!("{}\n", TRIALS_HEADER.join(",")));
    assert_eq!(read(s), format!("{}\n", SUMMARY_HEADER.join(",")));
}
