//! Benchmark harness: timing protocol, experiment grids and CSV output.

mod grid;
mod report;
mod timing;

pub use grid::{
    parse_sizes, run_grid, CaseKind, FormatPair, GridConfig, GridEntry, GridOutput, KernelId,
    KernelKind,
};
pub use report::{emit_csv, parse_csv, write_csv, CSV_HEADER};
pub use timing::{
    time_kernel, Clock, MonotonicClock, ScriptedClock, Stopwatch, Timing, TimingProtocol,
    CLOCK_OVERRIDE_ENV,
};

use crate::kernels::StrategyKind;

/// Timing result of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub inner_iters: u64,
    pub best_seconds: f64,
    /// `2 * multiplications / best_seconds / 1e6`.
    pub mflops: f64,
}

/// One row of benchmark output. Skipped cells carry no measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    /// Generator label, e.g. `fd-grid32` or `random-k5`.
    pub case: String,
    pub family: String,
    pub n: usize,
    pub kernel: KernelId,
    /// `None` for the classic kernel, which has no storing strategy.
    pub strategy: Option<StrategyKind>,
    pub seed: u64,
    pub measurement: Option<Measurement>,
}
