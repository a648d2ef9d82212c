//! Dense reference product used to check the sparse kernels.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0.0).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleProduct {
    pub product: DenseMatrix,
    /// Multiplications with both factors nonzero.
    pub structural_mults: u64,
}

/// Triple-loop product `A * B`.
pub fn multiply_dense_oracle(a: &DenseMatrix, b: &DenseMatrix) -> Result<OracleProduct> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            lhs_rows: a.rows,
            lhs_cols: a.cols,
            rhs_rows: b.rows,
            rhs_cols: b.cols,
        });
    }
    let mut product = DenseMatrix::zeros(a.rows, b.cols);
    let mut structural_mults = 0u64;
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut sum = 0.0;
            for k in 0..a.cols {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if x != 0.0 && y != 0.0 {
                    structural_mults += 1;
                }
                sum += x * y;
            }
            product.set(i, j, sum);
        }
    }
    Ok(OracleProduct {
        product,
        structural_mults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_squared() {
        let i2 = DenseMatrix::identity(2);
        let p = multiply_dense_oracle(&i2, &i2).unwrap();
        assert_eq!(p.product, i2);
        assert_eq!(p.structural_mults, 2);
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let b = DenseMatrix::from_rows(&[&[1.0, 0.0], &[3.0, 1.0]]);
        let p = multiply_dense_oracle(&a, &b).unwrap();
        assert_eq!(
            p.product,
            DenseMatrix::from_rows(&[&[7.0, 2.0], &[3.0, 1.0]])
        );
        // a00*b00, a01*b10, a01*b11, a11*b10, a11*b11
        assert_eq!(p.structural_mults, 5);
    }

    #[test]
    fn mismatch() {
        assert!(
            multiply_dense_oracle(&DenseMatrix::zeros(2, 3), &DenseMatrix::zeros(2, 3)).is_err()
        );
    }
}
