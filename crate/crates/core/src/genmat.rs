//! Deterministic test matrices: the 5-point finite difference stencil, random
//! matrices with a fixed number of entries per row, and random matrices with
//! a fixed per-row fill ratio.
//!
//! Random matrices are driven by SplitMix64 so that any implementation that
//! follows the same draw order reproduces them exactly:
//!
//! - rows are generated in order `0..n`;
//! - a row draws column candidates `(next_u64() * n) >> 64` until it holds
//!   `k` distinct columns, which are then sorted ascending;
//! - one value `((next_u64() >> 11) + 1) * 2^-53` in `(0, 1]` is drawn per
//!   column, in ascending column order.

use std::fmt;

use crate::error::{Error, Result};
use crate::formats::{CsrMatrix, SparseBuilder};

/// SplitMix64 pseudo random generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..bound` by multiply-shift.
    #[inline]
    pub fn below(&mut self, bound: usize) -> usize {
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Uniform double in `(0, 1]`.
    #[inline]
    pub fn unit_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// The three matrix families of the benchmark suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// 5-point stencil on a `grid x grid` mesh.
    Fd { grid: usize },
    /// `k` random entries per row.
    RandomK { k: usize },
    /// `max(1, round(fill * n))` random entries per row.
    FillRatio { fill: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Fd { .. } => "fd",
            Family::RandomK { .. } => "random",
            Family::FillRatio { .. } => "fill",
        }
    }
}

/// Full description of a generated matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn fd(grid: usize) -> Self {
        Self {
            family: Family::Fd { grid },
            n: grid * grid,
            seed: 0,
        }
    }

    pub fn random_k(n: usize, k: usize, seed: u64) -> Self {
        Self {
            family: Family::RandomK { k },
            n,
            seed,
        }
    }

    pub fn fill_ratio(n: usize, fill: f64, seed: u64) -> Self {
        Self {
            family: Family::FillRatio { fill },
            n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be >= 1".into(),
            ));
        }
        match self.family {
            Family::Fd { grid } if grid * grid != self.n => Err(Error::InvalidParameter(format!(
                "fd dimension {} is not grid^2 for grid {grid}",
                self.n
            ))),
            Family::RandomK { k } if k > self.n => Err(Error::InvalidParameter(format!(
                "k = {k} exceeds n = {}",
                self.n
            ))),
            Family::FillRatio { fill } if !(fill > 0.0 && fill <= 1.0) => Err(
                Error::InvalidParameter(format!("fill ratio {fill} outside (0, 1]")),
            ),
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<CsrMatrix> {
        self.validate()?;
        match self.family {
            Family::Fd { grid } => Ok(gen_fd(grid)),
            Family::RandomK { k } => gen_random_k(self.n, k, self.seed),
            Family::FillRatio { fill } => gen_fill_ratio(self.n, fill, self.seed),
        }
    }
}

/// Short label used in benchmark output, e.g. `fd-grid32`, `random-k5`.
impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Fd { grid } => write!(f, "fd-grid{grid}"),
            Family::RandomK { k } => write!(f, "random-k{k}"),
            Family::FillRatio { fill } => write!(f, "fill-{fill}"),
        }
    }
}

/// 5-point Dirichlet stencil on a `grid x grid` mesh: 4 on the diagonal, -1
/// for each mesh neighbour.
pub fn gen_fd(grid: usize) -> CsrMatrix {
    let n = grid * grid;
    let nnz = if grid == 0 { 0 } else { 5 * n - 4 * grid };
    let mut builder = SparseBuilder::new(n, n, nnz);
    for i in 0..n {
        let (x, y) = (i % grid, i / grid);
        let mut push =
            |c: usize, v: f64| builder.append(c, v).expect("stencil fits its reservation");
        if y > 0 {
            push(i - grid, -1.0);
        }
        if x > 0 {
            push(i - 1, -1.0);
        }
        push(i, 4.0);
        if x + 1 < grid {
            push(i + 1, -1.0);
        }
        if y + 1 < grid {
            push(i + grid, -1.0);
        }
        builder.finalize_row().expect("row count matches");
    }
    builder.finish_csr().expect("all rows finalized")
}

/// `n x n` matrix with exactly `k` distinct random columns per row.
pub fn gen_random_k(n: usize, k: usize, seed: u64) -> Result<CsrMatrix> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut builder = SparseBuilder::new(n, n, n * k);
    let mut taken = vec![false; n];
    let mut cols = Vec::with_capacity(k);
    for _ in 0..n {
        cols.clear();
        while cols.len() < k {
            let c = rng.below(n);
            if !taken[c] {
                taken[c] = true;
                cols.push(c);
            }
        }
        cols.sort_unstable();
        for &c in &cols {
            taken[c] = false;
            builder.append(c, rng.unit_open_closed())?;
        }
        builder.finalize_row()?;
    }
    Ok(builder.finish_csr()?)
}

/// Entries per row for a fill ratio: `fill * n` rounded half up, at least 1.
pub fn fill_ratio_k(n: usize, fill: f64) -> usize {
    ((fill * n as f64 + 0.5).floor() as usize).clamp(1, n.max(1))
}

pub fn gen_fill_ratio(n: usize, fill: f64, seed: u64) -> Result<CsrMatrix> {
    if !(fill > 0.0 && fill <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fill ratio {fill} outside (0, 1]"
        )));
    }
    gen_random_k(n, fill_ratio_k(n, fill), seed)
}
