//! Sparse matrix-matrix multiplication kernels.
//!
//! - [`multiply_rowmajor`]: Gustavson's algorithm on CSR operands. Each row
//!   of `A` scatters `a[r,k] * B[k,:]` into a dense [`RowAccumulator`], which
//!   a [`StrategyKind`] then writes into the result.
//! - [`multiply_colmajor`]: the same algorithm on CSC operands.
//! - [`multiply_classic`]: sparse dot products of CSR rows with CSC columns.
//! - [`multiply_mixed`]: any format pair, converting at most one operand.
//!
//! The result storage is reserved once from [`estimate_nnz`](crate::formats::estimate_nnz).
//! Every kernel has a `_probed` variant taking a [`Probe`] for instrumentation.

mod accumulator;
mod classic;
mod gustavson;
mod mixed;
mod oracle;

pub use accumulator::{combined_select, store_row, CombinedChoice, RowAccumulator};
pub use classic::{multiply_classic, multiply_classic_probed};
pub use gustavson::{
    multiply_colmajor, multiply_colmajor_probed, multiply_rowmajor, multiply_rowmajor_probed,
};
pub use mixed::{multiply_mixed, multiply_mixed_probed, AnyMatrix, MajorOrder};
pub use oracle::{multiply_dense_oracle, DenseMatrix, OracleProduct};

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// How a dense accumulated row is compressed into the sparse result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Scan every slot of the dense row.
    BruteForceDouble,
    /// Scan a bit-per-slot lookup field, reading values only where set.
    BruteForceBool,
    /// Scan a byte-per-slot lookup vector.
    BruteForceChar,
    /// Scan only between the lowest and highest touched index.
    MinMax,
    /// MinMax range, filtered through a byte lookup vector.
    MinMaxChar,
    /// Sort the list of touched indices and write those.
    Sort,
    /// Per row, MinMax when the range is short relative to the entry count,
    /// otherwise Sort. See [`combined_select`].
    Combined,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::BruteForceDouble,
        StrategyKind::BruteForceBool,
        StrategyKind::BruteForceChar,
        StrategyKind::MinMax,
        StrategyKind::MinMaxChar,
        StrategyKind::Sort,
        StrategyKind::Combined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::BruteForceDouble => "bfdouble",
            StrategyKind::BruteForceBool => "bfbool",
            StrategyKind::BruteForceChar => "bfchar",
            StrategyKind::MinMax => "minmax",
            StrategyKind::MinMaxChar => "minmaxchar",
            StrategyKind::Sort => "sort",
            StrategyKind::Combined => "combined",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy '{s}'")))
    }
}

/// One per-row decision of the combined strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombinedDecision {
    /// Output row (column for column-major kernels).
    pub line: usize,
    pub range_len: usize,
    pub line_nnz: usize,
    pub choice: CombinedChoice,
}

/// Instrumentation hook. All methods default to no-ops; `()` is the
/// zero-cost probe used by the plain kernel entry points.
pub trait Probe {
    /// Result capacity reserved up front.
    fn reserved(&mut self, _capacity: usize) {}
    /// Scalar multiplications performed (reported once per kernel run).
    fn multiplications(&mut self, _count: u64) {}
    /// An operand was converted between CSR and CSC.
    fn conversion(&mut self) {}
    fn combined_choice(&mut self, _decision: CombinedDecision) {}
    /// Called after every row epilogue with the reset accumulator.
    fn line_stored(&mut self, _acc: &RowAccumulator) {}
    /// Entries in the finished result.
    fn finished(&mut self, _nnz: usize) {}
}

impl Probe for () {}

/// Probe that records everything, including an accumulator hygiene check
/// after every row.
#[derive(Debug, Default, Clone)]
pub struct Counters {
    pub reserved: usize,
    pub multiplications: u64,
    pub conversions: usize,
    pub decisions: Vec<CombinedDecision>,
    pub lines: usize,
    pub dirty_lines: usize,
    pub result_nnz: usize,
}

impl Probe for Counters {
    fn reserved(&mut self, capacity: usize) {
        self.reserved += capacity;
    }

    fn multiplications(&mut self, count: u64) {
        self.multiplications += count;
    }

    fn conversion(&mut self) {
        self.conversions += 1;
    }

    fn combined_choice(&mut self, decision: CombinedDecision) {
        self.decisions.push(decision);
    }

    fn line_stored(&mut self, acc: &RowAccumulator) {
        self.lines += 1;
        if !acc.is_clean() {
            self.dirty_lines += 1;
        }
    }

    fn finished(&mut self, nnz: usize) {
        self.result_nnz += nnz;
    }
}
