//! Matrix Market coordinate format (`real general` and `integer general`).
//!
//! Values are written with Rust's shortest round-trip float formatting, so a
//! write followed by a read reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::CsrMatrix;
use crate::error::{Error, Result};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::MatrixMarket(format!("line {line}: {msg}"))
}

pub fn read_csr<R: BufRead>(reader: R) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::MatrixMarket("empty input".into()))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported layout '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field '{}'", tokens[3])));
    }
    if tokens[4] != "general" {
        return Err(parse_err(
            1,
            format!("unsupported symmetry '{}'", tokens[4]),
        ));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected 'rows cols nnz'"));
                }
                let parse = |s: &str| s.parse::<usize>().map_err(|e| parse_err(lineno, e));
                let dims = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                triplets.reserve(dims.2);
                size = Some(dims);
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected 'row col value'"));
                }
                let r: usize = fields[0].parse().map_err(|e| parse_err(lineno, e))?;
                let c: usize = fields[1].parse().map_err(|e| parse_err(lineno, e))?;
                let v: f64 = fields[2].parse().map_err(|e| parse_err(lineno, e))?;
                if r == 0 || c == 0 || r > rows || c > cols {
                    return Err(parse_err(
                        lineno,
                        format!("entry ({r}, {c}) outside {rows}x{cols}"),
                    ));
                }
                triplets.push((r - 1, c - 1, v));
            }
        }
    }

    let (rows, cols, nnz) = size.ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(Error::MatrixMarket(format!(
            "size line announces {nnz} entries, found {}",
            triplets.len()
        )));
    }

    triplets.sort_by_key(|&(r, c, _)| (r, c));
    if let Some(w) = triplets
        .windows(2)
        .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
    {
        return Err(Error::MatrixMarket(format!(
            "duplicate entry ({}, {})",
            w[0].0 + 1,
            w[0].1 + 1
        )));
    }

    let mut row_ptr = vec![0usize; rows + 1];
    for &(r, _, _) in &triplets {
        row_ptr[r + 1] += 1;
    }
    for r in 0..rows {
        row_ptr[r + 1] += row_ptr[r];
    }
    let (col_idx, values) = triplets.into_iter().map(|(_, c, v)| (c, v)).unzip();
    Ok(CsrMatrix::new(rows, cols, row_ptr, col_idx, values)?)
}

pub fn write_csr<W: Write>(a: &CsrMatrix, mut writer: W) -> Result<()> {
    writeln!(writer, "{HEADER}")?;
    writeln!(writer, "{} {} {}", a.rows(), a.cols(), a.nnz())?;
    for r in 0..a.rows() {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(writer, "{} {} {:?}", r + 1, c + 1, v)?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    read_csr(BufReader::new(File::open(path)?))
}

pub fn save(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_csr(a, BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmat::gen_random_k;
    use proptest::prelude::*;

    fn read_str(s: &str) -> Result<CsrMatrix> {
        read_csr(s.as_bytes())
    }

    #[test]
    fn reads_unordered_entries() {
        let m = read_str(
            "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 3\n2 2 3.0\n1 3 2\n1 1 1e0\n",
        )
        .unwrap();
        assert_eq!(m.row_ptr(), &[0, 2, 3]);
        assert_eq!(m.col_idx(), &[0, 2, 1]);
        assert_eq!(m.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn writes_one_based() {
        let a = CsrMatrix::new(2, 2, vec![0, 1, 1], vec![1], vec![0.5]).unwrap();
        let mut out = Vec::new();
        write_csr(&a, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 0.5\n"
        );
    }

    #[test]
    fn rejects_bad_input() {
        let hdr = "%%MatrixMarket matrix coordinate real general\n";
        assert!(read_str("").is_err());
        assert!(read_str("%%MatrixMarket matrix array real general\n1 1\n1\n").is_err());
        assert!(read_str("%%MatrixMarket matrix coordinate real symmetric\n1 1 0\n").is_err());
        assert!(read_str(&format!("{hdr}2 2 1\n3 1 1.0\n")).is_err());
        assert!(read_str(&format!("{hdr}2 2 1\n0 1 1.0\n")).is_err());
        assert!(read_str(&format!("{hdr}2 2 2\n1 1 1.0\n")).is_err());
        assert!(read_str(&format!("{hdr}2 2 2\n1 1 1.0\n1 1 2.0\n")).is_err());
        assert!(read_str(&format!("{hdr}2 2 1\n1 1 abc\n")).is_err());
    }

    #[test]
    fn file_round_trip() {
        let a = gen_random_k(20, 3, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        save(&a, &path).unwrap();
        assert!(load(&path).unwrap().bits_eq(&a));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(n in 1usize..40, k in 1usize..6, seed: u64) {
            let a = gen_random_k(n, k.min(n), seed).unwrap();
            let mut buf = Vec::new();
            write_csr(&a, &mut buf).unwrap();
            prop_assert!(read_csr(&buf[..]).unwrap().bits_eq(&a));
        }
    }
}
