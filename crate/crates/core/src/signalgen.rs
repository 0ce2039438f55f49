//! k-sparse 2D coefficient matrices and complete problem instances.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::sensing::{
    build_dictionary, build_omega, dct_matrix, gaussian_matrix, sample_separable, Dictionary,
    RandomStream, RngSeed,
};

/// Stream tags for sub-seed derivation: `seed.derive(tag)`.
const PHI_STREAM: u64 = 0x5048_4931; // "PHI1"
const SIGNAL_STREAM: u64 = 0x5a53_4947; // "ZSIG"

/// One nonzero of `Z`, 1-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spike {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Coordinate list of exactly `k` distinct, nonzero spikes in an `n × n` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSignal2D {
    n: usize,
    spikes: Vec<Spike>,
}

impl SparseSignal2D {
    /// Validates distinctness, bounds, and nonzero finite values.
    pub fn new(n: usize, spikes: Vec<Spike>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("signal side length must be positive".into()));
        }
        let mut seen = vec![false; n * n];
        for s in &spikes {
            if s.row == 0 || s.row > n || s.col == 0 || s.col > n {
                return Err(Error::InvalidArgument(format!(
                    "spike ({}, {}) outside 1..={n}",
                    s.row, s.col
                )));
            }
            if s.value == 0.0 || !s.value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "spike ({}, {}) has value {}, must be nonzero and finite",
                    s.row, s.col, s.value
                )));
            }
            let flat = n * (s.row - 1) + (s.col - 1);
            if std::mem::replace(&mut seen[flat], true) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate spike at ({}, {})",
                    s.row, s.col
                )));
            }
        }
        Ok(Self { n, spikes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.spikes.len()
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut z = DenseMatrix::zeros(self.n, self.n);
        for s in &self.spikes {
            z.set(s.row - 1, s.col - 1, s.value);
        }
        z
    }

    /// Support as 1-based flat indices `n (row - 1) + col`, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .spikes
            .iter()
            .map(|s| self.n * (s.row - 1) + s.col)
            .collect();
        s.sort_unstable();
        s
    }
}

/// Exactly `k` distinct positions drawn uniformly without replacement from the
/// `n × n` grid (partial Fisher–Yates), values i.i.d. N(0, 1) redrawn when
/// exactly zero. Spikes are listed in draw order.
pub fn sparse_signal(n: usize, k: usize, seed: RngSeed) -> Result<SparseSignal2D> {
    if n == 0 {
        return Err(Error::Dimension("signal side length must be positive".into()));
    }
    let cells = n
        .checked_mul(n)
        .ok_or_else(|| Error::Dimension(format!("{n}x{n} grid overflows")))?;
    if k > cells {
        return Err(Error::InvalidArgument(format!(
            "sparsity {k} exceeds the {cells} grid cells"
        )));
    }
    let mut stream = RandomStream::new(seed);
    let mut cells_left: Vec<usize> = (0..cells).collect();
    let mut spikes = Vec::with_capacity(k);
    for t in 0..k {
        let pick = t + stream.below((cells - t) as u64) as usize;
        cells_left.swap(t, pick);
        let flat = cells_left[t];
        let value = loop {
            let v = stream.normal();
            if v != 0.0 {
                break v;
            }
        };
        spikes.push(Spike {
            row: flat / n + 1,
            col: flat % n + 1,
            value,
        });
    }
    SparseSignal2D::new(n, spikes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: RngSeed,
}

/// A complete recovery problem: dictionary, ground truth, and measurements.
#[derive(Clone, Debug)]
pub struct Instance {
    pub dict: Dictionary,
    pub z_true: SparseSignal2D,
    pub y: DenseMatrix,
    pub omega: Option<DenseMatrix>,
    pub config: InstanceConfig,
}

impl Instance {
    /// Recomputes `A Z Aᵀ` and checks it against the stored `Y`.
    pub fn is_consistent(&self, rel_tol: f64) -> Result<bool> {
        let y = sample_separable(&self.dict, &self.z_true.to_dense())?;
        let scale = linalg::frobenius_norm(&y).max(f64::MIN_POSITIVE);
        Ok(linalg::frobenius_norm(&y.sub(&self.y)?) <= rel_tol * scale)
    }
}

/// DCT transform, Gaussian sensing, `k`-sparse signal, separable samples.
///
/// `Φ` and `Z` come from independent sub-seeds of `seed`, so `with_omega`
/// only decides whether `Ω` is also materialized.
pub fn make_instance(
    n: usize,
    m: usize,
    k: usize,
    seed: RngSeed,
    with_omega: bool,
) -> Result<Instance> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m <= n, got m={m}, n={n}"
        )));
    }
    let psi = dct_matrix(n)?;
    let phi = gaussian_matrix(m, n, seed.derive(PHI_STREAM))?;
    make_instance_with_operators(&phi, &psi, k, seed, with_omega)
}

/// Like [`make_instance`] with caller-supplied `Φ` (`m × n`) and `Ψ` (`n × n`).
///
/// Fixture hook for analytically solvable cases (`Φ = I`, `Ψ = I`); the CLI
/// never exposes it. The signal stream is derived exactly as in
/// [`make_instance`].
pub fn make_instance_with_operators(
    phi: &DenseMatrix,
    psi: &DenseMatrix,
    k: usize,
    seed: RngSeed,
    with_omega: bool,
) -> Result<Instance> {
    let dict = build_dictionary(phi, psi)?;
    let n = dict.n();
    let z_true = sparse_signal(n, k, seed.derive(SIGNAL_STREAM))?;
    let y = sample_separable(&dict, &z_true.to_dense())?;
    let omega = if with_omega {
        Some(build_omega(&dict, None)?)
    } else {
        None
    };
    Ok(Instance {
        config: InstanceConfig {
            n,
            m: dict.m(),
            k,
            seed,
        },
        dict,
        z_true,
        y,
        omega,
    })
}

const CONFIG_FILE: &str = "config.txt";
const A_FILE: &str = "A.txt";
const Y_FILE: &str = "Y.txt";
const SPIKES_FILE: &str = "spikes.csv";

/// Writes `config.txt` (key=value), `A.txt` and `Y.txt` (text matrix format),
/// and `spikes.csv` (`row,col,value`, 1-based) into `dir`, creating it.
pub fn save_instance(instance: &Instance, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let c = &instance.config;
    let mut config = String::new();
    let _ = writeln!(config, "n={}", c.n);
    let _ = writeln!(config, "m={}", c.m);
    let _ = writeln!(config, "k={}", c.k);
    let _ = writeln!(config, "seed={}", c.seed.0);
    let _ = writeln!(config, "generator={}", crate::sensing::GENERATOR_VERSION);
    let path = dir.join(CONFIG_FILE);
    fs::write(&path, config).map_err(|e| Error::io(&path, e))?;

    instance.dict.save(&dir.join(A_FILE))?;
    linalg::text::write_matrix(&dir.join(Y_FILE), &instance.y)?;

    let path = dir.join(SPIKES_FILE);
    let csv_err = |source| Error::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(["row", "col", "value"]).map_err(csv_err)?;
    for s in instance.z_true.spikes() {
        w.write_record([
            s.row.to_string(),
            s.col.to_string(),
            format!("{:.16e}", s.value),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// Reads an instance written by [`save_instance`]. Norms are recomputed from
/// `A`; `Ω` is never stored.
pub fn load_instance(dir: &Path) -> Result<Instance> {
    let path = dir.join(CONFIG_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut n = None;
    let mut m = None;
    let mut k = None;
    let mut seed = None;
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let loc = || format!("{}:{}", path.display(), no + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(loc(), "expected key=value"))?;
        let num = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|e| Error::parse(loc(), format!("{key}: {e}")))
        };
        match key.trim() {
            "n" => n = Some(num(value)? as usize),
            "m" => m = Some(num(value)? as usize),
            "k" => k = Some(num(value)? as usize),
            "seed" => seed = Some(RngSeed(num(value)?)),
            _ => {}
        }
    }
    let missing = |key: &str| Error::parse(path.display().to_string(), format!("missing key {key}"));
    let config = InstanceConfig {
        n: n.ok_or_else(|| missing("n"))?,
        m: m.ok_or_else(|| missing("m"))?,
        k: k.ok_or_else(|| missing("k"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
    };

    let dict = Dictionary::load(&dir.join(A_FILE))?;
    let y = linalg::text::read_matrix(&dir.join(Y_FILE))?;
    if dict.matrix().shape() != (config.m, config.n) || y.shape() != (config.m, config.m) {
        return Err(Error::parse(
            dir.display().to_string(),
            format!(
                "A is {:?} and Y is {:?}, config says m={} n={}",
                dict.matrix().shape(),
                y.shape(),
                config.m,
                config.n
            ),
        ));
    }

    let path = dir.join(SPIKES_FILE);
    let mut r = csv::Reader::from_path(&path).map_err(|source| Error::Csv {
        path: path.clone(),
        source,
    })?;
    let mut spikes = Vec::new();
    for rec in r.deserialize::<(usize, usize, f64)>() {
        let (row, col, value) = rec.map_err(|source| Error::Csv {
            path: path.clone(),
            source,
        })?;
        spikes.push(Spike { row, col, value });
    }
    let z_true = SparseSignal2D::new(config.n, spikes)?;
    if z_true.k() != config.k {
        return Err(Error::parse(
            path.display().to_string(),
            format!("{} spikes, config says k={}", z_true.k(), config.k),
        ));
    }
    Ok(Instance {
        dict,
        z_true,
        y,
        omega: None,
        config,
    })
}
