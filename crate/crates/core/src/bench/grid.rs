//! Experiment grids: matrix family x size x kernel x format pair x strategy.

use std::collections::BTreeMap;
use std::fmt;
use std::hint::black_box;
use std::str::FromStr;

use super::timing::{time_kernel, Stopwatch, TimingProtocol};
use super::{BenchRecord, Measurement};
use crate::error::{Error, Result};
use crate::formats::CsrMatrix;
use crate::genmat::{Family, GenSpec};
use crate::kernels::{
    multiply_classic, multiply_colmajor, multiply_dense_oracle, multiply_mixed, multiply_rowmajor,
    AnyMatrix, MajorOrder, StrategyKind,
};
use crate::perfmodel::count_mults;

/// Matrix family of a benchmark case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseKind {
    Fd,
    Random { k: usize },
    Fill { fill: f64 },
}

impl CaseKind {
    pub fn family(&self) -> &'static str {
        match self {
            CaseKind::Fd => "fd",
            CaseKind::Random { .. } => "random",
            CaseKind::Fill { .. } => "fill",
        }
    }

    /// Generator spec for a requested size. FD sizes round down to the
    /// nearest square `grid^2` (at least 1).
    pub fn spec(&self, n: usize, seed: u64) -> GenSpec {
        match *self {
            CaseKind::Fd => GenSpec::fd(isqrt(n).max(1)),
            CaseKind::Random { k } => GenSpec::random_k(n, k.min(n), seed),
            CaseKind::Fill { fill } => GenSpec::fill_ratio(n, fill, seed),
        }
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Classic,
    RowMajor,
    ColMajor,
    Mixed,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Classic,
        KernelKind::RowMajor,
        KernelKind::ColMajor,
        KernelKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Classic => "classic",
            KernelKind::RowMajor => "rowmajor",
            KernelKind::ColMajor => "colmajor",
            KernelKind::Mixed => "mixed",
        }
    }

    /// Format pairs the kernel runs on when none are requested explicitly.
    pub fn default_formats(self) -> &'static [FormatPair] {
        match self {
            KernelKind::Classic => &[FormatPair::CsrCsc],
            KernelKind::RowMajor => &[FormatPair::CsrCsr],
            KernelKind::ColMajor => &[FormatPair::CscCsc],
            KernelKind::Mixed => &FormatPair::ALL,
        }
    }

    pub fn accepts(self, formats: FormatPair) -> bool {
        self == KernelKind::Mixed || self.default_formats().contains(&formats)
    }

    /// Classic dot products have no result-storing strategy.
    pub fn uses_strategy(self) -> bool {
        self != KernelKind::Classic
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel '{s}'")))
    }
}

/// Storage formats of the (left, right) operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormatPair {
    CsrCsr,
    CsrCsc,
    CscCsr,
    CscCsc,
}

impl FormatPair {
    pub const ALL: [FormatPair; 4] = [
        FormatPair::CsrCsr,
        FormatPair::CsrCsc,
        FormatPair::CscCsr,
        FormatPair::CscCsc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormatPair::CsrCsr => "csr-csr",
            FormatPair::CsrCsc => "csr-csc",
            FormatPair::CscCsr => "csc-csr",
            FormatPair::CscCsc => "csc-csc",
        }
    }

    pub fn orders(self) -> (MajorOrder, MajorOrder) {
        use MajorOrder::*;
        match self {
            FormatPair::CsrCsr => (Row, Row),
            FormatPair::CsrCsc => (Row, Col),
            FormatPair::CscCsr => (Col, Row),
            FormatPair::CscCsc => (Col, Col),
        }
    }
}

impl fmt::Display for FormatPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormatPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormatPair::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown format pair '{s}'")))
    }
}

/// Kernel plus operand formats, written `kernel:lhs-rhs` in CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelId {
    pub kind: KernelKind,
    pub formats: FormatPair,
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.formats.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, formats) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("kernel id '{s}' lacks ':'")))?;
        Ok(KernelId {
            kind: kind.parse()?,
            formats: formats.parse()?,
        })
    }
}

/// Parses a size list: comma separated entries, each either a number or a
/// geometric range `start:end:xFACTOR` (inclusive of `end` when hit).
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    let bad = |msg: String| Error::InvalidParameter(format!("sizes '{spec}': {msg}"));
    let mut sizes = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [n] => sizes.push(n.parse().map_err(|e| bad(format!("{e}")))?),
            [start, end, factor] => {
                let start: usize = start.parse().map_err(|e| bad(format!("{e}")))?;
                let end: usize = end.parse().map_err(|e| bad(format!("{e}")))?;
                let factor: usize = factor
                    .strip_prefix('x')
                    .ok_or_else(|| bad(format!("factor '{factor}' must look like x2")))?
                    .parse()
                    .map_err(|e| bad(format!("{e}")))?;
                if start == 0 || factor < 2 {
                    return Err(bad("range needs start >= 1 and factor >= 2".into()));
                }
                let mut n = start;
                while n <= end {
                    sizes.push(n);
                    n = match n.checked_mul(factor) {
                        Some(next) => next,
                        None => break,
                    };
                }
            }
            _ => return Err(bad(format!("cannot parse '{item}'"))),
        }
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad("need at least one size >= 1".into()));
    }
    Ok(sizes)
}

#[derive(Debug, Clone)]
pub struct GridConfig {
    pub cases: Vec<CaseKind>,
    pub kernels: Vec<KernelKind>,
    /// Explicit format pairs; `None` uses each kernel's defaults.
    pub formats: Option<Vec<FormatPair>>,
    pub strategies: Vec<StrategyKind>,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub protocol: TimingProtocol,
    /// Check every result against a reference product.
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub record: BenchRecord,
    /// `count_mults` flops of the case; 0 for skipped cells.
    pub flops: u64,
}

#[derive(Debug, Clone, Default)]
pub struct GridOutput {
    pub entries: Vec<GridEntry>,
    pub diagnostics: Vec<String>,
}

impl GridOutput {
    pub fn records(&self) -> Vec<BenchRecord> {
        self.entries.iter().map(|e| e.record.clone()).collect()
    }

    pub fn skipped(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.record.measurement.is_none())
            .count()
    }
}

/// Operands of one (case, size) cell, prepared once outside timed regions.
struct Operands {
    a: CsrMatrix,
    b: CsrMatrix,
}

impl Operands {
    fn generate(spec: &GenSpec) -> Result<Self> {
        let a = spec.generate()?;
        let b = match spec.family {
            Family::Fd { .. } => a.clone(),
            _ => GenSpec {
                seed: spec.seed.wrapping_add(1),
                ..*spec
            }
            .generate()?,
        };
        Ok(Self { a, b })
    }

    fn in_formats(&self, formats: FormatPair) -> (AnyMatrix, AnyMatrix) {
        let (lo, ro) = formats.orders();
        (
            AnyMatrix::Csr(self.a.clone()).to_order(lo),
            AnyMatrix::Csr(self.b.clone()).to_order(ro),
        )
    }
}

/// One product through the kernel's public entry point.
fn run_once(
    id: KernelId,
    strategy: StrategyKind,
    a: &AnyMatrix,
    b: &AnyMatrix,
) -> Result<AnyMatrix> {
    match (id.kind, a, b) {
        (KernelKind::Classic, AnyMatrix::Csr(a), AnyMatrix::Csc(b)) => {
            Ok(AnyMatrix::Csr(multiply_classic(a, b)?))
        }
        (KernelKind::RowMajor, AnyMatrix::Csr(a), AnyMatrix::Csr(b)) => {
            Ok(AnyMatrix::Csr(multiply_rowmajor(a, b, strategy)?))
        }
        (KernelKind::ColMajor, AnyMatrix::Csc(a), AnyMatrix::Csc(b)) => {
            Ok(AnyMatrix::Csc(multiply_colmajor(a, b, strategy)?))
        }
        (KernelKind::Mixed, a, b) => multiply_mixed(a, b, strategy),
        _ => Err(Error::InvalidParameter(format!(
            "{id} cannot run on these operands"
        ))),
    }
}

/// Sparse reference product through ordered maps, independent of the kernels.
fn reference_product(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let mut row_ptr = vec![0];
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for r in 0..a.rows() {
        let mut row: BTreeMap<usize, f64> = BTreeMap::new();
        let (ak, av) = a.row(r);
        for (&k, &x) in ak.iter().zip(av) {
            let (bc, bv) = b.row(k);
            for (&c, &y) in bc.iter().zip(bv) {
                *row.entry(c).or_insert(0.0) += x * y;
            }
        }
        for (c, v) in row.into_iter().filter(|&(_, v)| v != 0.0) {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(values.len());
    }
    CsrMatrix::new(a.rows(), b.cols(), row_ptr, col_idx, values)
        .expect("reference product is well formed")
}

/// Largest dimension verified against the dense oracle; larger cases use the
/// sparse reference.
const DENSE_VERIFY_LIMIT: usize = 1024;

fn verify(ops: &Operands, result: AnyMatrix, label: &str) -> Result<()> {
    let c = result.into_csr();
    c.validate()?;
    let expected = if ops.a.rows() <= DENSE_VERIFY_LIMIT {
        let oracle = multiply_dense_oracle(&ops.a.to_dense(), &ops.b.to_dense())?;
        CsrMatrix::from_dense(&oracle.product)
    } else {
        reference_product(&ops.a, &ops.b)
    };
    if c.row_ptr() != expected.row_ptr() || c.col_idx() != expected.col_idx() {
        return Err(Error::Verification(format!(
            "{label}: sparsity structure differs"
        )));
    }
    for (&x, &y) in c.values().iter().zip(expected.values()) {
        if (x - y).abs() > 1e-12 * x.abs().max(y.abs()) {
            return Err(Error::Verification(format!(
                "{label}: value {x} differs from {y}"
            )));
        }
    }
    Ok(())
}

/// Runs every valid cell of the grid and returns records in the nested
/// order case, size, kernel, format pair, strategy.
pub fn run_grid(config: &GridConfig, clock: &mut dyn Stopwatch) -> Result<GridOutput> {
    let mut out = GridOutput::default();
    for case in &config.cases {
        for &requested in &config.sizes {
            let spec = case.spec(requested, config.seed);
            let ops = Operands::generate(&spec)?;
            let n = ops.a.rows();
            let flops = count_mults(&ops.a, &ops.b)?.flops;

            for &kind in &config.kernels {
                let formats: Vec<FormatPair> = match &config.formats {
                    Some(f) => f.clone(),
                    None => kind.default_formats().to_vec(),
                };
                for fmt in formats {
                    let id = KernelId { kind, formats: fmt };
                    let strategies: Vec<Option<StrategyKind>> = if kind.uses_strategy() {
                        config.strategies.iter().copied().map(Some).collect()
                    } else {
                        vec![None]
                    };
                    let record_for = |strategy| BenchRecord {
                        case: spec.to_string(),
                        family: case.family().to_string(),
                        n,
                        kernel: id,
                        strategy,
                        seed: config.seed,
                        measurement: None,
                    };

                    if !kind.accepts(fmt) {
                        for strategy in strategies {
                            out.diagnostics.push(format!(
                                "skipped {id} for {spec} n={n}: {} does not run on {} operands",
                                kind.name(),
                                fmt.name()
                            ));
                            out.entries.push(GridEntry {
                                record: record_for(strategy),
                                flops: 0,
                            });
                        }
                        continue;
                    }

                    let (a, b) = ops.in_formats(fmt);
                    for strategy in strategies {
                        let mut record = record_for(strategy);
                        let strat = strategy.unwrap_or(StrategyKind::Combined);

                        // warm-up run: loads the operands into cache
                        let first = run_once(id, strat, &a, &b)?;
                        if config.verify {
                            verify(&ops, first, &format!("{id} {} n={n}", record.case))?;
                        } else {
                            drop(first);
                        }

                        let timing = time_kernel(
                            || {
                                black_box(run_once(id, strat, &a, &b).expect("operands validated"));
                            },
                            flops,
                            &config.protocol,
                            clock,
                        )?;
                        record.measurement = Some(Measurement {
                            inner_iters: timing.inner_iters,
                            best_seconds: timing.best_seconds,
                            mflops: timing.mflops,
                        });
                        out.entries.push(GridEntry { record, flops });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::timing::ScriptedClock;

    fn quick_config() -> GridConfig {
        GridConfig {
            cases: vec![CaseKind::Fd],
            kernels: vec![KernelKind::RowMajor],
            formats: None,
            strategies: vec![StrategyKind::Combined],
            sizes: vec![16],
            seed: 42,
            protocol: TimingProtocol::default(),
            verify: true,
        }
    }

    fn fake_clock() -> ScriptedClock {
        ScriptedClock::new(vec![1.0]).unwrap()
    }

    #[test]
    fn single_cell() {
        let out = run_grid(&quick_config(), &mut fake_clock()).unwrap();
        assert_eq!(out.entries.len(), 1);
        let e = &out.entries[0];
        assert_eq!(e.record.case, "fd-grid4");
        assert_eq!(e.record.kernel.to_string(), "rowmajor:csr-csr");
        assert_eq!(
            e.flops,
            count_mults(&crate::genmat::gen_fd(4), &crate::genmat::gen_fd(4))
                .unwrap()
                .flops
        );
        let m = e.record.measurement.unwrap();
        assert_eq!(m.inner_iters, 4);
        assert_eq!(m.best_seconds, 1.0);
    }

    #[test]
    fn classic_on_csr_csr_is_skipped() {
        let cfg = GridConfig {
            kernels: vec![KernelKind::Classic],
            formats: Some(vec![FormatPair::CsrCsr]),
            ..quick_config()
        };
        let out = run_grid(&cfg, &mut fake_clock()).unwrap();
        assert_eq!(out.entries.len(), 1);
        assert_eq!(out.skipped(), 1);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.entries[0].record.strategy, None);
    }

    #[test]
    fn mixed_covers_all_pairs_in_order() {
        let cfg = GridConfig {
            cases: vec![CaseKind::Random { k: 5 }, CaseKind::Fill { fill: 0.01 }],
            kernels: vec![KernelKind::Mixed, KernelKind::Classic],
            strategies: vec![StrategyKind::Sort, StrategyKind::MinMax],
            sizes: vec![20, 40],
            ..quick_config()
        };
        let out = run_grid(&cfg, &mut fake_clock()).unwrap();
        // 2 cases x 2 sizes x (4 pairs x 2 strategies + 1 classic)
        assert_eq!(out.entries.len(), 36);
        assert_eq!(out.skipped(), 0);
        let labels: Vec<String> = out.entries[..9]
            .iter()
            .map(|e| e.record.kernel.to_string())
            .collect();
        assert_eq!(labels[0], "mixed:csr-csr");
        assert_eq!(labels[7], "mixed:csc-csc");
        assert_eq!(labels[8], "classic:csr-csc");
    }

    #[test]
    fn flops_are_deterministic() {
        let cfg = GridConfig {
            cases: vec![CaseKind::Random { k: 5 }],
            kernels: KernelKind::ALL.to_vec(),
            ..quick_config()
        };
        let key = |o: &GridOutput| -> Vec<(String, usize, String, u64)> {
            o.entries
                .iter()
                .map(|e| {
                    (
                        e.record.case.clone(),
                        e.record.n,
                        e.record.kernel.to_string(),
                        e.flops,
                    )
                })
                .collect()
        };
        let a = run_grid(&cfg, &mut fake_clock()).unwrap();
        let b = run_grid(&cfg, &mut fake_clock()).unwrap();
        assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn fd_sizes_round_to_squares() {
        assert_eq!(CaseKind::Fd.spec(1000, 0).n, 961);
        assert_eq!(CaseKind::Fd.spec(1024, 0).n, 1024);
        assert_eq!(CaseKind::Fd.spec(1, 0).n, 1);
    }

    #[test]
    fn size_specs() {
        assert_eq!(parse_sizes("64,128").unwrap(), vec![64, 128]);
        assert_eq!(
            parse_sizes("64:1024:x2").unwrap(),
            vec![64, 128, 256, 512, 1024]
        );
        assert_eq!(parse_sizes("10:100:x3, 5").unwrap(), vec![10, 30, 90, 5]);
        assert!(parse_sizes("").is_err());
        assert!(parse_sizes("0").is_err());
        assert!(parse_sizes("1:10:2").is_err());
        assert!(parse_sizes("1:10:x1").is_err());
    }

    #[test]
    fn kernel_ids_parse() {
        for kind in KernelKind::ALL {
            for f in FormatPair::ALL {
                let id = KernelId { kind, formats: f };
                assert_eq!(id.to_string().parse::<KernelId>().unwrap(), id);
            }
        }
        assert!("rowmajor".parse::<KernelId>().is_err());
    }

    #[test]
    fn reference_matches_kernel_on_large_case() {
        let a = crate::genmat::gen_random_k(2000, 5, 1).unwrap();
        let b = crate::genmat::gen_random_k(2000, 5, 2).unwrap();
        let c = multiply_rowmajor(&a, &b, StrategyKind::Combined).unwrap();
        assert!(reference_product(&a, &b).bits_eq(&c));
    }
}
