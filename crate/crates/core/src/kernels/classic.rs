use super::Probe;
use crate::error::Result;
use crate::formats::{check_dims, CscMatrix, CsrMatrix, SparseBuilder};

/// `C = A * B` by one sparse dot product per output position: a two-pointer
/// merge of row `r` of `A` with column `c` of `B`.
///
/// An entry is stored only if the merge found at least one matching index and
/// the sum is not exactly zero.
pub fn multiply_classic(a: &CsrMatrix, b: &CscMatrix) -> Result<CsrMatrix> {
    multiply_classic_probed(a, b, &mut ())
}

pub fn multiply_classic_probed<P: Probe>(
    a: &CsrMatrix,
    b: &CscMatrix,
    probe: &mut P,
) -> Result<CsrMatrix> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;

    // nnz of every row of B, for the same reservation the other kernels make
    let mut b_row_len = vec![0usize; b.rows()];
    for &r in b.row_idx() {
        b_row_len[r] += 1;
    }
    let capacity: usize = a.col_idx().iter().map(|&k| b_row_len[k]).sum();
    probe.reserved(capacity);

    let mut builder = SparseBuilder::new(a.rows(), b.cols(), capacity);
    let mut mults = 0u64;
    for r in 0..a.rows() {
        let (a_idx, a_vals) = a.row(r);
        if !a_idx.is_empty() {
            for c in 0..b.cols() {
                let (b_idx, b_vals) = b.col(c);
                let (mut i, mut j) = (0, 0);
                let mut sum = 0.0;
                let mut matched = false;
                while i < a_idx.len() && j < b_idx.len() {
                    let (ka, kb) = (a_idx[i], b_idx[j]);
                    if ka < kb {
                        i += 1;
                    } else if ka > kb {
                        j += 1;
                    } else {
                        sum += a_vals[i] * b_vals[j];
                        matched = true;
                        mults += 1;
                        i += 1;
                        j += 1;
                    }
                }
                if matched && sum != 0.0 {
                    builder.append(c, sum)?;
                }
            }
        }
        builder.finalize_row()?;
    }

    probe.multiplications(mults);
    let c = builder.finish_csr()?;
    probe.finished(c.nnz());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::csr_to_csc;
    use crate::genmat::gen_random_k;
    use crate::kernels::Counters;

    #[test]
    fn identity_times_b() {
        let b = gen_random_k(25, 3, 8).unwrap();
        let c = multiply_classic(&CsrMatrix::identity(25), &csr_to_csc(&b)).unwrap();
        assert!(c.bits_eq(&b));
    }

    #[test]
    fn disjoint_sparsity_is_empty() {
        // A populates only column 0, B populates only row 1
        let a = CsrMatrix::new(3, 3, vec![0, 1, 2, 3], vec![0, 0, 0], vec![1.0, 2.0, 3.0]).unwrap();
        let b = CscMatrix::new(3, 3, vec![0, 1, 2, 3], vec![1, 1, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let mut probe = Counters::default();
        let c = multiply_classic_probed(&a, &b, &mut probe).unwrap();
        assert_eq!(c.nnz(), 0);
        assert_eq!(c.row_ptr(), &[0, 0, 0, 0]);
        assert_eq!(probe.multiplications, 0);
    }

    #[test]
    fn cancelled_dot_product_is_dropped() {
        let a = CsrMatrix::new(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 1.0]).unwrap();
        let b = CscMatrix::new(2, 1, vec![0, 2], vec![0, 1], vec![2.0, -2.0]).unwrap();
        assert_eq!(multiply_classic(&a, &b).unwrap().nnz(), 0);
    }

    #[test]
    fn mismatch() {
        assert!(multiply_classic(&CsrMatrix::zeros(2, 3), &CscMatrix::zeros(2, 3)).is_err());
    }
}
