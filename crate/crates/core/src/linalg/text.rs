//! Plain-text matrix format used for fixtures and instance files.
//!
//! ```text
//! p q
//! a11 a12 ... a1q
//! ...
//! ap1 ap2 ... apq
//! ```
//!
//! Entries are written with 17 significant digits so that every double
//! survives a write/read cycle unchanged.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 25 + 16);
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{x:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, source: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(source, "empty matrix file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let at = |line: usize| format!("{source}:{}", line + 1);
    if dims.len() != 2 {
        return Err(Error::parse(at(header_no), "header must be \"p q\""));
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| Error::parse(at(header_no), format!("bad dimension {s:?}: {e}")))
    };
    let (p, q) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

    let mut data = Vec::with_capacity(p.saturating_mul(q).min(1 << 24));
    let mut rows = 0;
    for (line_no, line) in lines {
        let before = data.len();
        for tok in line.split_whitespace() {
            let x: f64 = tok
                .parse()
                .map_err(|e| Error::parse(at(line_no), format!("bad entry {tok:?}: {e}")))?;
            if !x.is_finite() {
                return Err(Error::parse(at(line_no), format!("non-finite entry {tok:?}")));
            }
            data.push(x);
        }
        if data.len() - before != q {
            return Err(Error::parse(
                at(line_no),
                format!("expected {q} entries, found {}", data.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != p {
        return Err(Error::parse(source, format!("expected {p} rows, found {rows}")));
    }
    DenseMatrix::from_vec(p, q, data)
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    fs::write(path, format_matrix(m)).map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_layout() {
        let m = DenseMatrix::from_rows(&[[1.0, -0.5]]).unwrap();
        assert_eq!(
            format_matrix(&m),
            "1 2\n1.0000000000000000e0 -5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn round_trip_is_exact() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| {
            (i as f64 + 1.0).sqrt() / (j as f64 + 3.0) * if j % 2 == 0 { 1e-300 } else { 1e300 }
        });
        let back = parse_matrix(&format_matrix(&m), "mem").unwrap();
        assert_eq!(back, m);
        assert!(back
            .as_slice()
            .iter()
            .zip(m.as_slice())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_matrix("", "x").is_err());
        assert!(parse_matrix("2\n1 2\n", "x").is_err());
        assert!(parse_matrix("2 2\n1 2\n3\n", "x").is_err());
        assert!(parse_matrix("2 2\n1 2\n", "x").is_err());
        assert!(parse_matrix("1 1\nNaN\n", "x").is_err());
        let err = parse_matrix("1 2\n1 zz\n", "fixture.txt").unwrap_err();
        assert!(err.to_string().contains("fixture.txt:2"), "{err}");
    }
}
