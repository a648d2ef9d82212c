use super::{Compressed, CscMatrix, CsrMatrix};
use crate::error::BuildError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Rows,
    Cols,
}

/// Streaming writer for compressed matrices.
///
/// Entries are appended line by line in strictly increasing inner index and
/// each line is sealed with [`finalize_row`](Self::finalize_row). Storage for
/// exactly `capacity` entries is reserved at construction; appends never
/// reallocate, and exceeding the reservation is reported as an error.
#[derive(Debug)]
pub struct SparseBuilder {
    orientation: Orientation,
    outer: usize,
    inner: usize,
    capacity: usize,
    ptr: Vec<usize>,
    idx: Vec<usize>,
    values: Vec<f64>,
    // first index allowed for the next append in the current line
    next_min: usize,
}

impl SparseBuilder {
    /// Builder for a `rows x cols` CSR matrix.
    pub fn new(rows: usize, cols: usize, capacity: usize) -> Self {
        Self::with_orientation(Orientation::Rows, rows, cols, capacity)
    }

    /// Builder for a `rows x cols` CSC matrix; appends address rows within
    /// the current column.
    pub fn new_csc(rows: usize, cols: usize, capacity: usize) -> Self {
        Self::with_orientation(Orientation::Cols, cols, rows, capacity)
    }

    pub(crate) fn raw(outer: usize, inner: usize, capacity: usize) -> Self {
        Self::with_orientation(Orientation::Rows, outer, inner, capacity)
    }

    fn with_orientation(
        orientation: Orientation,
        outer: usize,
        inner: usize,
        capacity: usize,
    ) -> Self {
        let mut ptr = Vec::with_capacity(outer + 1);
        ptr.push(0);
        Self {
            orientation,
            outer,
            inner,
            capacity,
            ptr,
            idx: Vec::with_capacity(capacity),
            values: Vec::with_capacity(capacity),
            next_min: 0,
        }
    }

    #[inline]
    pub fn append(&mut self, index: usize, value: f64) -> Result<(), BuildError> {
        if self.finalized() == self.outer {
            return Err(BuildError::RowsExhausted { outer: self.outer });
        }
        if index >= self.inner {
            return Err(BuildError::IndexOutOfBounds {
                index,
                inner: self.inner,
            });
        }
        if index < self.next_min {
            return Err(BuildError::OutOfOrder {
                index,
                previous: self.next_min - 1,
            });
        }
        if self.idx.len() == self.capacity {
            return Err(BuildError::CapacityExceeded {
                capacity: self.capacity,
            });
        }
        self.idx.push(index);
        self.values.push(value);
        self.next_min = index + 1;
        Ok(())
    }

    /// Seals the current line.
    #[inline]
    pub fn finalize_row(&mut self) -> Result<(), BuildError> {
        if self.finalized() == self.outer {
            return Err(BuildError::RowsExhausted { outer: self.outer });
        }
        self.ptr.push(self.idx.len());
        self.next_min = 0;
        Ok(())
    }

    /// Number of lines sealed so far.
    pub fn finalized(&self) -> usize {
        self.ptr.len() - 1
    }

    /// Entries appended so far.
    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Capacity of the underlying allocation; stays fixed while appending.
    pub fn allocated(&self) -> usize {
        self.idx.capacity().min(self.values.capacity())
    }

    pub(crate) fn finish_raw(self) -> Result<Compressed, BuildError> {
        if self.finalized() != self.outer {
            return Err(BuildError::Incomplete {
                finalized: self.finalized(),
                outer: self.outer,
            });
        }
        Ok(Compressed {
            outer: self.outer,
            inner: self.inner,
            ptr: self.ptr,
            idx: self.idx,
            values: self.values,
        })
    }

    pub fn finish_csr(self) -> Result<CsrMatrix, BuildError> {
        if self.orientation != Orientation::Rows {
            return Err(BuildError::WrongOrientation);
        }
        Ok(CsrMatrix {
            storage: self.finish_raw()?,
        })
    }

    pub fn finish_csc(self) -> Result<CscMatrix, BuildError> {
        if self.orientation != Orientation::Cols {
            return Err(BuildError::WrongOrientation);
        }
        Ok(CscMatrix {
            storage: self.finish_raw()?,
        })
    }
}
