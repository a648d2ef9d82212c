//! Dense row accumulator and the result-storing strategies.
//!
//! Every strategy shares the same scatter (`dense[x] += a * b` in the same
//! order), so they differ only in how the finished row is located and written
//! out. All of them append in increasing index order, drop exact zeros and
//! leave the accumulator clean for the next row.

use super::StrategyKind;
use crate::error::BuildError;
use crate::formats::SparseBuilder;

/// Store method chosen per row by [`StrategyKind::Combined`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinedChoice {
    MinMax,
    Sort,
}

/// `MinMax` iff the touched range is shorter than twice the row's entry count.
#[inline]
pub fn combined_select(range_len: usize, row_nnz: usize) -> CombinedChoice {
    if range_len < 2 * row_nnz {
        CombinedChoice::MinMax
    } else {
        CombinedChoice::Sort
    }
}

/// Bookkeeping a strategy performs while a row is accumulated.
pub(crate) trait Tracking {
    const KIND: StrategyKind;
    const BITS: bool = false;
    const BYTES: bool = false;
    const RANGE: bool = false;
    const LIST: bool = false;
}

macro_rules! tracking {
    ($name:ident, $kind:ident $(, $flag:ident)*) => {
        pub(crate) struct $name;
        impl Tracking for $name {
            const KIND: StrategyKind = StrategyKind::$kind;
            $(const $flag: bool = true;)*
        }
    };
}

tracking!(TrackBfDouble, BruteForceDouble);
tracking!(TrackBfBool, BruteForceBool, BITS);
tracking!(TrackBfChar, BruteForceChar, BYTES);
tracking!(TrackMinMax, MinMax, RANGE);
tracking!(TrackMinMaxChar, MinMaxChar, RANGE, BYTES);
tracking!(TrackSort, Sort, LIST);
tracking!(TrackCombined, Combined, RANGE, LIST);

/// Sparse accumulator for one output row.
#[derive(Debug, Clone)]
pub struct RowAccumulator {
    strategy: StrategyKind,
    dense: Vec<f64>,
    bits: Vec<u64>,
    bytes: Vec<u8>,
    touched: Vec<usize>,
    min_idx: usize,
    max_idx: usize,
}

impl RowAccumulator {
    /// Scratch for rows of length `len`; only the lookup state the strategy
    /// needs is allocated.
    pub fn new(len: usize, strategy: StrategyKind) -> Self {
        use StrategyKind::*;
        let bits = match strategy {
            BruteForceBool => vec![0u64; len.div_ceil(64)],
            _ => Vec::new(),
        };
        let bytes = match strategy {
            BruteForceChar | MinMaxChar => vec![0u8; len],
            _ => Vec::new(),
        };
        Self {
            strategy,
            dense: vec![0.0; len],
            bits,
            bytes,
            touched: Vec::new(),
            min_idx: len,
            max_idx: 0,
        }
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    pub fn len(&self) -> usize {
        self.dense.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dense.is_empty()
    }

    /// Adds `value` at position `idx` of the current row.
    pub fn add(&mut self, idx: usize, value: f64) {
        use StrategyKind::*;
        match self.strategy {
            BruteForceDouble => self.scatter::<TrackBfDouble>(idx, value),
            BruteForceBool => self.scatter::<TrackBfBool>(idx, value),
            BruteForceChar => self.scatter::<TrackBfChar>(idx, value),
            MinMax => self.scatter::<TrackMinMax>(idx, value),
            MinMaxChar => self.scatter::<TrackMinMaxChar>(idx, value),
            Sort => self.scatter::<TrackSort>(idx, value),
            Combined => self.scatter::<TrackCombined>(idx, value),
        }
    }

    /// Touched range `(min, max)` of the current row, if MinMax state is kept
    /// and the row is nonempty.
    pub fn range(&self) -> Option<(usize, usize)> {
        (self.min_idx <= self.max_idx).then_some((self.min_idx, self.max_idx))
    }

    /// True when the scratch is ready for a new row: dense all zero, lookups
    /// clear, index list empty and min/max at their sentinels.
    pub fn is_clean(&self) -> bool {
        self.dense.iter().all(|&v| v.to_bits() == 0)
            && self.bits.iter().all(|&w| w == 0)
            && self.bytes.iter().all(|&b| b == 0)
            && self.touched.is_empty()
            && self.min_idx == self.dense.len()
            && self.max_idx == 0
    }

    #[inline(always)]
    pub(crate) fn scatter<T: Tracking>(&mut self, idx: usize, value: f64) {
        let slot = &mut self.dense[idx];
        if T::LIST {
            // +0.0 means untouched; a touched slot whose sum is exactly zero
            // holds -0.0, which leaves later sums unchanged
            if slot.to_bits() == 0 {
                self.touched.push(idx);
            }
            *slot += value;
            if slot.to_bits() == 0 {
                *slot = -0.0;
            }
        } else {
            *slot += value;
        }
        if T::BITS {
            self.bits[idx >> 6] |= 1u64 << (idx & 63);
        }
        if T::BYTES {
            self.bytes[idx] = 1;
        }
        if T::RANGE {
            self.min_idx = self.min_idx.min(idx);
            self.max_idx = self.max_idx.max(idx);
        }
    }

    #[inline]
    pub(crate) fn store<T: Tracking>(
        &mut self,
        builder: &mut SparseBuilder,
    ) -> Result<Option<(usize, usize, CombinedChoice)>, BuildError> {
        let mut decision = None;
        match T::KIND {
            StrategyKind::BruteForceDouble => self.store_bf_double(builder)?,
            StrategyKind::BruteForceBool => self.store_bf_bool(builder)?,
            StrategyKind::BruteForceChar => self.store_bf_char(builder)?,
            StrategyKind::MinMax => self.store_min_max(builder)?,
            StrategyKind::MinMaxChar => self.store_min_max_char(builder)?,
            StrategyKind::Sort => self.store_sorted(builder)?,
            StrategyKind::Combined => {
                if let Some((lo, hi)) = self.range() {
                    let range_len = hi - lo + 1;
                    let row_nnz = self.touched.len();
                    let choice = combined_select(range_len, row_nnz);
                    match choice {
                        CombinedChoice::MinMax => {
                            self.touched.clear();
                            self.store_min_max(builder)?;
                        }
                        CombinedChoice::Sort => {
                            self.store_sorted(builder)?;
                            self.reset_range();
                        }
                    }
                    decision = Some((range_len, row_nnz, choice));
                }
            }
        }
        builder.finalize_row()?;
        Ok(decision)
    }

    fn store_bf_double(&mut self, builder: &mut SparseBuilder) -> Result<(), BuildError> {
        for (x, slot) in self.dense.iter_mut().enumerate() {
            let v = *slot;
            if v != 0.0 {
                builder.append(x, v)?;
                *slot = 0.0;
            }
        }
        Ok(())
    }

    fn store_bf_bool(&mut self, builder: &mut SparseBuilder) -> Result<(), BuildError> {
        for (w, word) in self.bits.iter_mut().enumerate() {
            let mut set = *word;
            if set == 0 {
                continue;
            }
            while set != 0 {
                let x = (w << 6) | set.trailing_zeros() as usize;
                let v = self.dense[x];
                if v != 0.0 {
                    builder.append(x, v)?;
                    self.dense[x] = 0.0;
                }
                set &= set - 1;
            }
            *word = 0;
        }
        Ok(())
    }

    fn store_bf_char(&mut self, builder: &mut SparseBuilder) -> Result<(), BuildError> {
        for (x, flag) in self.bytes.iter_mut().enumerate() {
            if *flag != 0 {
                let v = self.dense[x];
                if v != 0.0 {
                    builder.append(x, v)?;
                    self.dense[x] = 0.0;
                }
                *flag = 0;
            }
        }
        Ok(())
    }

    fn store_min_max(&mut self, builder: &mut SparseBuilder) -> Result<(), BuildError> {
        if let Some((lo, hi)) = self.range() {
            for (x, slot) in self.dense[lo..=hi].iter_mut().enumerate() {
                let v = *slot;
                if v.to_bits() != 0 {
                    if v != 0.0 {
                        builder.append(lo + x, v)?;
                    }
                    *slot = 0.0;
                }
            }
        }
        self.reset_range();
        Ok(())
    }

    fn store_min_max_char(&mut self, builder: &mut SparseBuilder) -> Result<(), BuildError> {
        if let Some((lo, hi)) = self.range() {
            for x in lo..=hi {
                if self.bytes[x] != 0 {
                    let v = self.dense[x];
                    if v != 0.0 {
                        builder.append(x, v)?;
                        self.dense[x] = 0.0;
                    }
                    self.bytes[x] = 0;
                }
            }
        }
        self.reset_range();
        Ok(())
    }

    fn store_sorted(&mut self, builder: &mut SparseBuilder) -> Result<(), BuildError> {
        self.touched.sort_unstable();
        for &x in &self.touched {
            let v = self.dense[x];
            if v != 0.0 {
                builder.append(x, v)?;
            }
            self.dense[x] = 0.0;
        }
        self.touched.clear();
        Ok(())
    }

    #[inline]
    fn reset_range(&mut self) {
        self.min_idx = self.dense.len();
        self.max_idx = 0;
    }
}

/// Writes the accumulated row to `builder`, seals the row and resets the
/// accumulator. Returns the per-row decision for the combined strategy.
pub fn store_row(
    acc: &mut RowAccumulator,
    builder: &mut SparseBuilder,
) -> Result<Option<CombinedChoice>, BuildError> {
    use StrategyKind::*;
    let decision = match acc.strategy {
        BruteForceDouble => acc.store::<TrackBfDouble>(builder)?,
        BruteForceBool => acc.store::<TrackBfBool>(builder)?,
        BruteForceChar => acc.store::<TrackBfChar>(builder)?,
        MinMax => acc.store::<TrackMinMax>(builder)?,
        MinMaxChar => acc.store::<TrackMinMaxChar>(builder)?,
        Sort => acc.store::<TrackSort>(builder)?,
        Combined => acc.store::<TrackCombined>(builder)?,
    };
    Ok(decision.map(|(_, _, choice)| choice))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row(strategy: StrategyKind) -> (Vec<usize>, Vec<f64>, RowAccumulator) {
        let mut acc = RowAccumulator::new(10, strategy);
        acc.add(7, 0.5);
        acc.add(2, 1.0);
        acc.add(5, -1.0);
        let mut b = SparseBuilder::new(1, 10, 3);
        store_row(&mut acc, &mut b).unwrap();
        let m = b.finish_csr().unwrap();
        (m.col_idx().to_vec(), m.values().to_vec(), acc)
    }

    #[test]
    fn sort_appends_in_index_order() {
        let (idx, vals, acc) = sample_row(StrategyKind::Sort);
        assert_eq!(idx, [2, 5, 7]);
        assert_eq!(vals, [1.0, -1.0, 0.5]);
        assert!(acc.is_clean());
    }

    #[test]
    fn min_max_scans_only_the_range() {
        let mut acc = RowAccumulator::new(10, StrategyKind::MinMax);
        acc.add(7, 0.5);
        acc.add(2, 1.0);
        acc.add(5, -1.0);
        assert_eq!(acc.range(), Some((2, 7)));
        let (idx, vals, _) = sample_row(StrategyKind::MinMax);
        assert_eq!(idx, [2, 5, 7]);
        assert_eq!(vals, [1.0, -1.0, 0.5]);
    }

    #[test]
    fn every_strategy_stores_the_same_row() {
        let (ref_idx, ref_vals, _) = sample_row(StrategyKind::Sort);
        for s in StrategyKind::ALL {
            let (idx, vals, acc) = sample_row(s);
            assert_eq!(idx, ref_idx, "{s}");
            assert_eq!(vals, ref_vals, "{s}");
            assert!(acc.is_clean(), "{s}");
        }
    }

    #[test]
    fn empty_row_only_finalizes() {
        for s in StrategyKind::ALL {
            let mut acc = RowAccumulator::new(5, s);
            let mut b = SparseBuilder::new(1, 5, 0);
            assert_eq!(store_row(&mut acc, &mut b).unwrap(), None);
            assert_eq!(b.len(), 0);
            assert_eq!(b.finalized(), 1);
            assert!(acc.is_clean());
        }
    }

    #[test]
    fn cancelled_entries_are_dropped_and_cleared() {
        for s in StrategyKind::ALL {
            let mut acc = RowAccumulator::new(130, s);
            acc.add(3, 1.0);
            acc.add(3, -1.0);
            acc.add(3, 2.0);
            acc.add(129, 1.5);
            acc.add(64, 4.0);
            acc.add(64, -4.0);
            let mut b = SparseBuilder::new(1, 130, 6);
            store_row(&mut acc, &mut b).unwrap();
            let m = b.finish_csr().unwrap();
            assert_eq!(m.col_idx(), &[3, 129], "{s}");
            assert_eq!(m.values(), &[2.0, 1.5], "{s}");
            assert!(acc.is_clean(), "{s}");
        }
    }

    #[test]
    fn retouched_after_cancellation_counts_once() {
        let mut acc = RowAccumulator::new(10, StrategyKind::Combined);
        acc.add(4, 1.0);
        acc.add(4, -1.0);
        acc.add(4, 3.0);
        acc.add(4, -3.0);
        acc.add(4, 0.5);
        let mut b = SparseBuilder::new(1, 10, 5);
        // one distinct index over a range of 1
        assert_eq!(
            store_row(&mut acc, &mut b).unwrap(),
            Some(CombinedChoice::MinMax)
        );
        assert!(acc.is_clean());
        let m = b.finish_csr().unwrap();
        assert_eq!((m.col_idx(), m.values()), (&[4][..], &[0.5][..]));
    }

    #[test]
    fn combined_follows_the_rule() {
        // range 2..=7 (len 6) with 3 entries: 6 < 6 fails, so Sort
        let mut acc = RowAccumulator::new(10, StrategyKind::Combined);
        for x in [2, 5, 7] {
            acc.add(x, 1.0);
        }
        let mut b = SparseBuilder::new(2, 10, 6);
        assert_eq!(
            store_row(&mut acc, &mut b).unwrap(),
            Some(CombinedChoice::Sort)
        );
        for x in [4, 5, 6] {
            acc.add(x, 1.0);
        }
        assert_eq!(
            store_row(&mut acc, &mut b).unwrap(),
            Some(CombinedChoice::MinMax)
        );
        assert!(acc.is_clean());
    }

    #[test]
    fn combined_select_rule() {
        assert_eq!(combined_select(10, 6), CombinedChoice::MinMax);
        assert_eq!(combined_select(12, 6), CombinedChoice::Sort);
        assert_eq!(combined_select(1, 1), CombinedChoice::MinMax);
        assert_eq!(combined_select(2, 1), CombinedChoice::Sort);
    }

    #[test]
    fn accumulator_reports_capacity_overflow() {
        let mut acc = RowAccumulator::new(4, StrategyKind::BruteForceDouble);
        acc.add(0, 1.0);
        acc.add(1, 1.0);
        let mut b = SparseBuilder::new(1, 4, 1);
        assert_eq!(
            store_row(&mut acc, &mut b),
            Err(BuildError::CapacityExceeded { capacity: 1 })
        );
    }
}
