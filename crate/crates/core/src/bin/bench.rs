//! Command line front end: benchmark grids, the performance model, matrix
//! generation and one-off products of Matrix Market files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sparsemm::bench::{
    parse_sizes, run_grid, write_csv, CaseKind, Clock, FormatPair, GridConfig, KernelKind,
    TimingProtocol,
};
use sparsemm::formats::mtx;
use sparsemm::genmat::GenSpec;
use sparsemm::kernels::{multiply_classic, multiply_mixed, AnyMatrix};
use sparsemm::perfmodel::{roofline, RooflineParams, REFERENCE_L1_BANDWIDTH, REFERENCE_PEAK_FLOPS};
use sparsemm::{csr_to_csc, Error, Result, StrategyKind};

#[derive(Parser)]
#[command(
    name = "bench",
    version,
    about = "Sparse matrix-matrix multiplication benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time a grid of cases, kernels, strategies and sizes; write CSV.
    Run(RunArgs),
    /// Evaluate the light-speed bound min(peak, bandwidth / balance).
    Model(ModelArgs),
    /// Generate a matrix and write it in Matrix Market format.
    Gen(GenArgs),
    /// Multiply two Matrix Market files.
    Multiply(MultiplyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Fd,
    Random,
    Fill,
}

impl CaseArg {
    fn kind(self, k: usize, fill: f64) -> CaseKind {
        match self {
            CaseArg::Fd => CaseKind::Fd,
            CaseArg::Random => CaseKind::Random { k },
            CaseArg::Fill => CaseKind::Fill { fill },
        }
    }
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "fd")]
    case: Vec<CaseArg>,
    /// classic, rowmajor, colmajor or mixed.
    #[arg(long, value_delimiter = ',', default_value = "rowmajor")]
    kernel: Vec<KernelKind>,
    /// bfdouble, bfbool, bfchar, minmax, minmaxchar, sort or combined.
    #[arg(long, value_delimiter = ',', default_value = "combined")]
    strategy: Vec<StrategyKind>,
    /// Operand format pairs (csr-csr, csr-csc, csc-csr, csc-csc); defaults
    /// to the natural pairs of each kernel.
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<FormatPair>>,
    /// Sizes: a list like `64,256` and/or ranges like `64:1048576:x2`.
    #[arg(long, default_value = "1024")]
    sizes: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Nonzeros per row of the random case.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Per-row fill ratio of the fill case.
    #[arg(long, default_value_t = 0.001)]
    fill: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Check every product against a reference.
    #[arg(long)]
    verify: bool,
    /// Exit nonzero if any combination was skipped.
    #[arg(long)]
    strict: bool,
    /// Calibration threshold in seconds.
    #[arg(long, default_value_t = 2.0)]
    min_time: f64,
    #[arg(long, default_value_t = 5)]
    trials: usize,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// Peak rate in flops/s.
    #[arg(long, default_value_t = REFERENCE_PEAK_FLOPS)]
    peak: f64,
    /// Bandwidth in bytes/s.
    #[arg(long, default_value_t = REFERENCE_L1_BANDWIDTH)]
    bandwidth: f64,
    /// Code balance in bytes/flop.
    #[arg(long, default_value_t = 16.0)]
    balance: f64,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Dimension; FD rounds down to a square grid.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.001)]
    fill: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MultiplyArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "rowmajor")]
    kernel: KernelKind,
    #[arg(long, default_value = "combined")]
    strategy: StrategyKind,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(args: RunArgs) -> Result<ExitCode> {
    if args.min_time <= 0.0 || args.trials == 0 {
        return Err(Error::InvalidParameter(
            "--min-time and --trials must be positive".into(),
        ));
    }
    let config = GridConfig {
        cases: args
            .case
            .iter()
            .map(|c| c.kind(args.k, args.fill))
            .collect(),
        kernels: args.kernel,
        formats: args.formats,
        strategies: args.strategy,
        sizes: parse_sizes(&args.sizes)?,
        seed: args.seed,
        protocol: TimingProtocol {
            min_total_seconds: args.min_time,
            min_trials: args.trials,
            ..TimingProtocol::default()
        },
        verify: args.verify,
    };
    let mut clock = Clock::from_env()?;
    let out = run_grid(&config, &mut clock)?;
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    let mut w = output(&args.csv)?;
    write_csv(&out.records(), &mut w)?;
    w.flush()?;
    if args.strict && out.skipped() > 0 {
        eprintln!("{} combination(s) skipped", out.skipped());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn model(args: ModelArgs) -> Result<ExitCode> {
    let bound = roofline(&RooflineParams::new(
        args.peak,
        args.bandwidth,
        args.balance,
    )?);
    println!("bound: {} MFlop/s", bound.mflops());
    println!("limb: {}", bound.limb);
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let spec = match args.case {
        CaseArg::Random => GenSpec::random_k(args.n, args.k, args.seed),
        case => case.kind(args.k, args.fill).spec(args.n, args.seed),
    };
    let m = spec.generate()?;
    let mut w = output(&args.out)?;
    mtx::write_csr(&m, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn multiply(args: MultiplyArgs) -> Result<ExitCode> {
    let a = mtx::load(&args.a)?;
    let b = mtx::load(&args.b)?;
    let c = match args.kernel {
        KernelKind::Classic => multiply_classic(&a, &csr_to_csc(&b))?,
        KernelKind::RowMajor | KernelKind::Mixed => {
            multiply_mixed(&AnyMatrix::Csr(a), &AnyMatrix::Csr(b), args.strategy)?.into_csr()
        }
        KernelKind::ColMajor => {
            let (a, b) = (
                AnyMatrix::Csc(csr_to_csc(&a)),
                AnyMatrix::Csc(csr_to_csc(&b)),
            );
            multiply_mixed(&a, &b, args.strategy)?.into_csr()
        }
    };
    let mut w = output(&args.out)?;
    mtx::write_csr(&c, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Model(a) => model(a),
        Command::Gen(a) => gen(a),
        Command::Multiply(a) => multiply(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
