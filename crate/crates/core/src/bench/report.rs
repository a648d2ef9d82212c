//! CSV output of benchmark records.
//!
//! `best_seconds` is written in scientific notation with 6 significant
//! digits, `mflops` with 3 decimals. Skipped cells have `inner_iters` 0 and
//! empty timing fields; the classic kernel's strategy is written as `-`.

use std::io::{Read, Write};

use super::{BenchRecord, Measurement};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "case",
    "family",
    "n",
    "kernel",
    "strategy",
    "seed",
    "inner_iters",
    "best_seconds",
    "mflops",
];

pub fn write_csv<W: Write>(records: &[BenchRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let (iters, best, rate) = match &r.measurement {
            Some(m) => (
                m.inner_iters.to_string(),
                format!("{:.5e}", m.best_seconds),
                format!("{:.3}", m.mflops),
            ),
            None => ("0".to_string(), String::new(), String::new()),
        };
        w.write_record([
            r.case.clone(),
            r.family.clone(),
            r.n.to_string(),
            r.kernel.to_string(),
            r.strategy
                .map_or_else(|| "-".to_string(), |s| s.to_string()),
            r.seed.to_string(),
            iters,
            best,
            rate,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::Reader::from_reader(reader);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidParameter("unexpected csv header".into()));
    }
    let bad = |field: &str, e: &dyn std::fmt::Display| {
        Error::InvalidParameter(format!("csv field {field}: {e}"))
    };
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| row.get(i).unwrap_or("");
        let inner_iters: u64 = f(6).parse().map_err(|e| bad("inner_iters", &e))?;
        let measurement = if f(7).is_empty() {
            None
        } else {
            Some(Measurement {
                inner_iters,
                best_seconds: f(7).parse().map_err(|e| bad("best_seconds", &e))?,
                mflops: f(8).parse().map_err(|e| bad("mflops", &e))?,
            })
        };
        out.push(BenchRecord {
            case: f(0).to_string(),
            family: f(1).to_string(),
            n: f(2).parse().map_err(|e| bad("n", &e))?,
            kernel: f(3).parse()?,
            strategy: match f(4) {
                "-" => None,
                s => Some(s.parse()?),
            },
            seed: f(5).parse().map_err(|e| bad("seed", &e))?,
            measurement,
        });
    }
    Ok(out)
}
