//! CSR <-> CSC conversion by counting sort.

use super::{Compressed, CscMatrix, CsrMatrix};

impl Compressed {
    /// Re-compresses the storage along the other dimension in O(nnz + inner).
    ///
    /// Lines are scattered in increasing order, so the inner indices of every
    /// output line come out strictly increasing without a sort.
    pub(crate) fn transposed(&self) -> Compressed {
        let mut ptr = vec![0usize; self.inner + 1];
        for &i in &self.idx {
            ptr[i + 1] += 1;
        }
        for i in 0..self.inner {
            ptr[i + 1] += ptr[i];
        }

        let nnz = self.nnz();
        let mut idx = vec![0usize; nnz];
        let mut values = vec![0.0f64; nnz];
        let mut cursor = ptr[..self.inner].to_vec();
        for line in 0..self.outer {
            let (lane_idx, lane_vals) = self.lane(line);
            for (&i, &v) in lane_idx.iter().zip(lane_vals) {
                let pos = cursor[i];
                idx[pos] = line;
                values[pos] = v;
                cursor[i] += 1;
            }
        }

        Compressed {
            outer: self.inner,
            inner: self.outer,
            ptr,
            idx,
            values,
        }
    }
}

pub fn csr_to_csc(a: &CsrMatrix) -> CscMatrix {
    CscMatrix {
        storage: a.storage.transposed(),
    }
}

pub fn csc_to_csr(a: &CscMatrix) -> CsrMatrix {
    CsrMatrix {
        storage: a.storage.transposed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmat::gen_random_k;

    #[test]
    fn diagonal_converts_to_itself() {
        let a = CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).unwrap();
        let c = csr_to_csc(&a);
        assert_eq!(c.col_ptr(), &[0, 1, 2]);
        assert_eq!(c.row_idx(), &[0, 1]);
        assert_eq!(c.values(), &[1.0, 2.0]);
    }

    #[test]
    fn two_by_three_by_hand() {
        // [[1, 0, 2],
        //  [0, 3, 0]]
        let a = CsrMatrix::new(2, 3, vec![0, 2, 3], vec![0, 2, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let c = csr_to_csc(&a);
        assert_eq!((c.rows(), c.cols()), (2, 3));
        assert_eq!(c.col_ptr(), &[0, 1, 2, 3]);
        assert_eq!(c.row_idx(), &[0, 1, 0]);
        assert_eq!(c.values(), &[1.0, 3.0, 2.0]);
        c.validate().unwrap();
        assert!(csc_to_csr(&c).bits_eq(&a));
    }

    #[test]
    fn rectangular_random_round_trip() {
        let a = gen_random_k(30, 4, 3).unwrap();
        let c = csr_to_csc(&a);
        c.validate().unwrap();
        assert_eq!(c.to_dense(), a.to_dense());
        assert!(csc_to_csr(&c).bits_eq(&a));
    }

    #[test]
    fn empty_matrix() {
        let a = CsrMatrix::zeros(3, 5);
        let c = csr_to_csc(&a);
        assert_eq!(c.col_ptr(), &[0; 6]);
        assert!(csc_to_csr(&c).bits_eq(&a));
    }
}
