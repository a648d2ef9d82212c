//! Best-of-N timing with inner-repetition calibration.
//!
//! The inner repetition count starts at 1 and doubles until one batch runs
//! longer than the protocol's minimum total time. That count is then fixed
//! and at least `min_trials` further batches are timed; the fastest
//! per-invocation time is reported.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::perfmodel::mflops;

/// Environment variable selecting a scripted clock instead of the monotonic
/// one. Value: comma separated per-invocation costs in seconds, one per
/// timed batch; the last cost repeats once the list is exhausted.
pub const CLOCK_OVERRIDE_ENV: &str = "SPARSEMM_CLOCK_OVERRIDE";

/// Times a batch of repeated invocations.
pub trait Stopwatch {
    /// Runs `work` `iters` times and returns the elapsed seconds.
    fn time_batch(&mut self, iters: u64, work: &mut dyn FnMut()) -> f64;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct MonotonicClock;

impl Stopwatch for MonotonicClock {
    fn time_batch(&mut self, iters: u64, work: &mut dyn FnMut()) -> f64 {
        let start = Instant::now();
        for _ in 0..iters {
            work();
        }
        start.elapsed().as_secs_f64()
    }
}

/// Fake clock for protocol tests: the work still runs, but each batch is
/// charged `iters * cost` with the next scripted per-invocation cost.
#[derive(Debug, Clone)]
pub struct ScriptedClock {
    costs: Vec<f64>,
    next: usize,
}

impl ScriptedClock {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if costs.is_empty() || costs.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidParameter(
                "scripted clock needs positive finite costs".into(),
            ));
        }
        Ok(Self { costs, next: 0 })
    }

    /// Parses the `SPARSEMM_CLOCK_OVERRIDE` syntax, e.g. `1e-3` or `1e-3,5e-4`.
    pub fn parse(spec: &str) -> Result<Self> {
        let costs = spec
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| {
                    Error::InvalidParameter(format!("{CLOCK_OVERRIDE_ENV}: '{s}': {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(costs)
    }

    pub fn batches(&self) -> usize {
        self.next
    }
}

impl Stopwatch for ScriptedClock {
    fn time_batch(&mut self, iters: u64, work: &mut dyn FnMut()) -> f64 {
        for _ in 0..iters {
            work();
        }
        let cost = self.costs[self.next.min(self.costs.len() - 1)];
        self.next += 1;
        iters as f64 * cost
    }
}

/// Clock chosen at runtime.
#[derive(Debug, Clone)]
pub enum Clock {
    Monotonic(MonotonicClock),
    Scripted(ScriptedClock),
}

impl Clock {
    /// Monotonic clock unless `SPARSEMM_CLOCK_OVERRIDE` is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CLOCK_OVERRIDE_ENV) {
            Ok(spec) => Ok(Clock::Scripted(ScriptedClock::parse(&spec)?)),
            Err(std::env::VarError::NotPresent) => Ok(Clock::Monotonic(MonotonicClock)),
            Err(e) => Err(Error::InvalidParameter(format!(
                "{CLOCK_OVERRIDE_ENV}: {e}"
            ))),
        }
    }
}

impl Stopwatch for Clock {
    fn time_batch(&mut self, iters: u64, work: &mut dyn FnMut()) -> f64 {
        match self {
            Clock::Monotonic(c) => c.time_batch(iters, work),
            Clock::Scripted(c) => c.time_batch(iters, work),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingProtocol {
    /// A calibrated batch must run strictly longer than this.
    pub min_total_seconds: f64,
    pub min_trials: usize,
    /// Calibration gives up past this many inner iterations.
    pub max_inner_iters: u64,
}

impl Default for TimingProtocol {
    fn default() -> Self {
        Self {
            min_total_seconds: 2.0,
            min_trials: 5,
            max_inner_iters: 1 << 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub inner_iters: u64,
    /// Elapsed time of the final calibration batch.
    pub calibration_seconds: f64,
    pub calibration_batches: usize,
    /// Per-invocation seconds of every trial, in order.
    pub trial_seconds: Vec<f64>,
    pub best_seconds: f64,
    pub flops: u64,
    pub mflops: f64,
}

/// Measures `work`, which must perform `flops` floating point operations per
/// invocation.
pub fn time_kernel<F: FnMut()>(
    mut work: F,
    flops: u64,
    protocol: &TimingProtocol,
    clock: &mut dyn Stopwatch,
) -> Result<Timing> {
    let mut inner_iters = 1u64;
    let mut calibration_batches = 0;
    let calibration_seconds = loop {
        let elapsed = clock.time_batch(inner_iters, &mut work);
        calibration_batches += 1;
        if elapsed > protocol.min_total_seconds {
            break elapsed;
        }
        if inner_iters >= protocol.max_inner_iters {
            return Err(Error::InvalidParameter(format!(
                "clock did not reach {} s within {inner_iters} iterations",
                protocol.min_total_seconds
            )));
        }
        inner_iters *= 2;
    };

    let trial_seconds: Vec<f64> = (0..protocol.min_trials.max(1))
        .map(|_| clock.time_batch(inner_iters, &mut work) / inner_iters as f64)
        .collect();
    let best_seconds = trial_seconds.iter().copied().fold(f64::INFINITY, f64::min);

    Ok(Timing {
        inner_iters,
        calibration_seconds,
        calibration_batches,
        trial_seconds,
        best_seconds,
        flops,
        mflops: mflops(flops, best_seconds),
    })
}
