//! Compressed sparse row/column storage.
//!
//! Both formats share one [`Compressed`] layout: an outer pointer array of
//! length `outer + 1`, and parallel inner-index and value arrays of length
//! nnz. For CSR the outer dimension is the row, for CSC it is the column.
//! Indices are `usize`, which this crate requires to be 64 bits wide.

mod builder;
mod convert;
pub mod mtx;

pub use builder::SparseBuilder;
pub use convert::{csc_to_csr, csr_to_csc};

use crate::error::{Error, FormatError, Result};
use crate::kernels::DenseMatrix;

const _: () = assert!(usize::BITS == 64, "sparse indices are 64-bit");

/// Orientation-agnostic compressed storage.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Compressed {
    pub(crate) outer: usize,
    pub(crate) inner: usize,
    pub(crate) ptr: Vec<usize>,
    pub(crate) idx: Vec<usize>,
    pub(crate) values: Vec<f64>,
}

impl Compressed {
    fn empty(outer: usize, inner: usize) -> Self {
        Self {
            outer,
            inner,
            ptr: vec![0; outer + 1],
            idx: Vec::new(),
            values: Vec::new(),
        }
    }

    fn identity(n: usize) -> Self {
        Self {
            outer: n,
            inner: n,
            ptr: (0..=n).collect(),
            idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    #[inline]
    pub(crate) fn lane(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.ptr[i]..self.ptr[i + 1];
        (&self.idx[range.clone()], &self.values[range])
    }

    #[inline]
    pub(crate) fn lane_len(&self, i: usize) -> usize {
        self.ptr[i + 1] - self.ptr[i]
    }

    pub(crate) fn nnz(&self) -> usize {
        self.values.len()
    }

    fn validate(&self) -> std::result::Result<(), FormatError> {
        if self.ptr.len() != self.outer + 1 {
            return Err(FormatError::PointerLength {
                len: self.ptr.len(),
                expected: self.outer + 1,
            });
        }
        if self.ptr[0] != 0 {
            return Err(FormatError::PointerStart);
        }
        if self.idx.len() != self.values.len() {
            return Err(FormatError::LengthMismatch {
                indices: self.idx.len(),
                values: self.values.len(),
            });
        }
        if let Some(pos) = self.ptr.windows(2).position(|w| w[0] > w[1]) {
            return Err(FormatError::PointerDecreasing { pos: pos + 1 });
        }
        let last = self.ptr[self.outer];
        if last != self.idx.len() {
            return Err(FormatError::PointerEnd {
                last,
                nnz: self.idx.len(),
            });
        }
        for line in 0..self.outer {
            let (idx, _) = self.lane(line);
            if let Some(&index) = idx.iter().find(|&&i| i >= self.inner) {
                return Err(FormatError::IndexOutOfBounds {
                    line,
                    index,
                    inner: self.inner,
                });
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FormatError::Unsorted { line });
            }
        }
        Ok(())
    }

    pub(crate) fn bits_eq(&self, other: &Self) -> bool {
        self.outer == other.outer
            && self.inner == other.inner
            && self.ptr == other.ptr
            && self.idx == other.idx
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub(crate) storage: Compressed,
}

/// Compressed sparse column matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub(crate) storage: Compressed,
}

impl CsrMatrix {
    /// Builds a matrix from raw arrays, checking every storage invariant.
    pub fn new(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> std::result::Result<Self, FormatError> {
        let storage = Compressed {
            outer: rows,
            inner: cols,
            ptr: row_ptr,
            idx: col_idx,
            values,
        };
        storage.validate()?;
        Ok(Self { storage })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            storage: Compressed::empty(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            storage: Compressed::identity(n),
        }
    }

    /// Collects the nonzero entries of a dense matrix.
    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut row_ptr = Vec::with_capacity(dense.rows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..dense.rows() {
            for c in 0..dense.cols() {
                let v = dense.get(r, c);
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self {
            storage: Compressed {
                outer: dense.rows(),
                inner: dense.cols(),
                ptr: row_ptr,
                idx: col_idx,
                values,
            },
        }
    }

    pub fn rows(&self) -> usize {
        self.storage.outer
    }

    pub fn cols(&self) -> usize {
        self.storage.inner
    }

    pub fn nnz(&self) -> usize {
        self.storage.nnz()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.storage.ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.storage.idx
    }

    pub fn values(&self) -> &[f64] {
        &self.storage.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        self.storage.lane(r)
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.storage.lane_len(r)
    }

    /// Debug check of all CSR invariants. Never called from the kernels.
    pub fn validate(&self) -> std::result::Result<(), FormatError> {
        self.storage.validate()
    }

    /// Equality of dimensions, structure and the bit patterns of all values.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.storage.bits_eq(&other.storage)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut dense = DenseMatrix::zeros(self.rows(), self.cols());
        for r in 0..self.rows() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                dense.set(r, c, v);
            }
        }
        dense
    }

    pub fn into_parts(self) -> (usize, usize, Vec<usize>, Vec<usize>, Vec<f64>) {
        let s = self.storage;
        (s.outer, s.inner, s.ptr, s.idx, s.values)
    }
}

impl CscMatrix {
    /// Builds a matrix from raw arrays, checking every storage invariant.
    pub fn new(
        rows: usize,
        cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> std::result::Result<Self, FormatError> {
        let storage = Compressed {
            outer: cols,
            inner: rows,
            ptr: col_ptr,
            idx: row_idx,
            values,
        };
        storage.validate()?;
        Ok(Self { storage })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            storage: Compressed::empty(cols, rows),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            storage: Compressed::identity(n),
        }
    }

    pub fn rows(&self) -> usize {
        self.storage.inner
    }

    pub fn cols(&self) -> usize {
        self.storage.outer
    }

    pub fn nnz(&self) -> usize {
        self.storage.nnz()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.storage.ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.storage.idx
    }

    pub fn values(&self) -> &[f64] {
        &self.storage.values
    }

    /// Row indices and values of column `c`.
    pub fn col(&self, c: usize) -> (&[usize], &[f64]) {
        self.storage.lane(c)
    }

    pub fn validate(&self) -> std::result::Result<(), FormatError> {
        self.storage.validate()
    }

    pub fn bits_eq(&self, other: &Self) -> bool {
        self.storage.bits_eq(&other.storage)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut dense = DenseMatrix::zeros(self.rows(), self.cols());
        for c in 0..self.cols() {
            let (rows, vals) = self.col(c);
            for (&r, &v) in rows.iter().zip(vals) {
                dense.set(r, c, v);
            }
        }
        dense
    }
}

/// Upper bound on nnz(A*B): the number of scalar multiplications the product
/// performs. Each product term either lands on a fresh position or is added to
/// an existing one, so the count never underestimates.
pub fn estimate_nnz(a: &CsrMatrix, b: &CsrMatrix) -> Result<usize> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;
    Ok(estimate_compressed(&a.storage, &b.storage))
}

/// Same bound for the row-major product over raw storage; `lhs.inner` must
/// equal `rhs.outer`.
#[inline]
pub(crate) fn estimate_compressed(lhs: &Compressed, rhs: &Compressed) -> usize {
    lhs.idx.iter().map(|&k| rhs.lane_len(k)).sum()
}

pub(crate) fn check_dims(
    lhs_rows: usize,
    lhs_cols: usize,
    rhs_rows: usize,
    rhs_cols: usize,
) -> Result<()> {
    if lhs_cols != rhs_rows {
        return Err(Error::DimensionMismatch {
            lhs_rows,
            lhs_cols,
            rhs_rows,
            rhs_cols,
        });
    }
    Ok(())
}
