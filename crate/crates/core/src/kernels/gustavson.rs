use super::accumulator::*;
use super::{CombinedDecision, Probe, StrategyKind};
use crate::error::{BuildError, Result};
use crate::formats::{
    check_dims, estimate_compressed, Compressed, CscMatrix, CsrMatrix, SparseBuilder,
};

/// Row-by-row product of two compressed operands sharing an orientation.
///
/// `lhs.inner` must equal `rhs.outer`. For CSC operands the caller swaps the
/// operands: CSC storage of `A` is CSR storage of `A^T`, and `C^T = B^T A^T`.
/// Every output entry still sums its terms in increasing inner index.
fn gustavson<T: Tracking, P: Probe>(
    lhs: &Compressed,
    rhs: &Compressed,
    probe: &mut P,
) -> std::result::Result<Compressed, BuildError> {
    let capacity = estimate_compressed(lhs, rhs);
    probe.reserved(capacity);
    let mut builder = SparseBuilder::raw(lhs.outer, rhs.inner, capacity);
    let mut acc = RowAccumulator::new(rhs.inner, T::KIND);
    let mut mults = 0u64;

    for line in 0..lhs.outer {
        let (l_idx, l_vals) = lhs.lane(line);
        for (&k, &lv) in l_idx.iter().zip(l_vals) {
            let (r_idx, r_vals) = rhs.lane(k);
            mults += r_idx.len() as u64;
            for (&x, &rv) in r_idx.iter().zip(r_vals) {
                acc.scatter::<T>(x, lv * rv);
            }
        }
        if let Some((range_len, line_nnz, choice)) = acc.store::<T>(&mut builder)? {
            probe.combined_choice(CombinedDecision {
                line,
                range_len,
                line_nnz,
                choice,
            });
        }
        probe.line_stored(&acc);
    }

    probe.multiplications(mults);
    let out = builder.finish_raw()?;
    probe.finished(out.nnz());
    Ok(out)
}

fn dispatch<P: Probe>(
    lhs: &Compressed,
    rhs: &Compressed,
    strategy: StrategyKind,
    probe: &mut P,
) -> std::result::Result<Compressed, BuildError> {
    match strategy {
        StrategyKind::BruteForceDouble => gustavson::<TrackBfDouble, P>(lhs, rhs, probe),
        StrategyKind::BruteForceBool => gustavson::<TrackBfBool, P>(lhs, rhs, probe),
        StrategyKind::BruteForceChar => gustavson::<TrackBfChar, P>(lhs, rhs, probe),
        StrategyKind::MinMax => gustavson::<TrackMinMax, P>(lhs, rhs, probe),
        StrategyKind::MinMaxChar => gustavson::<TrackMinMaxChar, P>(lhs, rhs, probe),
        StrategyKind::Sort => gustavson::<TrackSort, P>(lhs, rhs, probe),
        StrategyKind::Combined => gustavson::<TrackCombined, P>(lhs, rhs, probe),
    }
}

/// `C = A * B` for CSR operands.
pub fn multiply_rowmajor(
    a: &CsrMatrix,
    b: &CsrMatrix,
    strategy: StrategyKind,
) -> Result<CsrMatrix> {
    multiply_rowmajor_probed(a, b, strategy, &mut ())
}

pub fn multiply_rowmajor_probed<P: Probe>(
    a: &CsrMatrix,
    b: &CsrMatrix,
    strategy: StrategyKind,
    probe: &mut P,
) -> Result<CsrMatrix> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;
    Ok(CsrMatrix {
        storage: dispatch(&a.storage, &b.storage, strategy, probe)?,
    })
}

/// `C = A * B` for CSC operands; the accumulator runs over columns of `C`.
pub fn multiply_colmajor(
    a: &CscMatrix,
    b: &CscMatrix,
    strategy: StrategyKind,
) -> Result<CscMatrix> {
    multiply_colmajor_probed(a, b, strategy, &mut ())
}

pub fn multiply_colmajor_probed<P: Probe>(
    a: &CscMatrix,
    b: &CscMatrix,
    strategy: StrategyKind,
    probe: &mut P,
) -> Result<CscMatrix> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;
    Ok(CscMatrix {
        storage: dispatch(&b.storage, &a.storage, strategy, probe)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::formats::csr_to_csc;
    use crate::genmat::{gen_fd, gen_random_k};
    use crate::kernels::{multiply_dense_oracle, Counters};

    #[test]
    fn identity_times_b_is_b() {
        let b = gen_random_k(20, 4, 1).unwrap();
        let i = CsrMatrix::identity(20);
        for s in StrategyKind::ALL {
            assert!(multiply_rowmajor(&i, &b, s).unwrap().bits_eq(&b), "{s}");
            let bc = csr_to_csc(&b);
            let ic = CscMatrix::identity(20);
            assert!(multiply_colmajor(&ic, &bc, s).unwrap().bits_eq(&bc), "{s}");
        }
    }

    #[test]
    fn fd_grid2_squared_matches_oracle() {
        let fd = gen_fd(2);
        let oracle = multiply_dense_oracle(&fd.to_dense(), &fd.to_dense()).unwrap();
        for s in StrategyKind::ALL {
            let c = multiply_rowmajor(&fd, &fd, s).unwrap();
            c.validate().unwrap();
            assert_eq!(c.to_dense(), oracle.product, "{s}");
        }
    }

    #[test]
    fn zero_times_b() {
        let z = CscMatrix::zeros(5, 5);
        let b = csr_to_csc(&gen_random_k(5, 2, 0).unwrap());
        let c = multiply_colmajor(&z, &b, StrategyKind::Combined).unwrap();
        assert_eq!(c.col_ptr(), &[0; 6]);
        assert_eq!(c.nnz(), 0);
    }

    #[test]
    fn rectangular_shapes() {
        // 2x3 times 3x4
        let a = CsrMatrix::new(2, 3, vec![0, 2, 3], vec![0, 2, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let b = CsrMatrix::new(
            3,
            4,
            vec![0, 1, 2, 4],
            vec![3, 0, 0, 1],
            vec![1.0, 1.0, 5.0, 6.0],
        )
        .unwrap();
        let oracle = multiply_dense_oracle(&a.to_dense(), &b.to_dense()).unwrap();
        for s in StrategyKind::ALL {
            let c = multiply_rowmajor(&a, &b, s).unwrap();
            assert_eq!((c.rows(), c.cols()), (2, 4));
            assert_eq!(c.to_dense(), oracle.product);
            let cc = multiply_colmajor(&csr_to_csc(&a), &csr_to_csc(&b), s).unwrap();
            assert_eq!(cc.to_dense(), oracle.product);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = CsrMatrix::zeros(2, 3);
        assert!(matches!(
            multiply_rowmajor(&a, &a, StrategyKind::Sort),
            Err(Error::DimensionMismatch { .. })
        ));
        let ac = CscMatrix::zeros(2, 3);
        assert!(multiply_colmajor(&ac, &ac, StrategyKind::Sort).is_err());
    }

    #[test]
    fn cancellation_is_dropped_uniformly() {
        // row [1, 1] times [[1], [-1]] cancels to exactly zero
        let a = CsrMatrix::new(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 1.0]).unwrap();
        let b = CsrMatrix::new(2, 1, vec![0, 1, 2], vec![0, 0], vec![1.0, -1.0]).unwrap();
        for s in StrategyKind::ALL {
            let c = multiply_rowmajor(&a, &b, s).unwrap();
            assert_eq!(c.nnz(), 0, "{s}");
            assert_eq!(c.row_ptr(), &[0, 0]);
        }
    }

    #[test]
    fn probe_sees_capacity_and_clean_rows() {
        let a = gen_random_k(50, 5, 3).unwrap();
        let b = gen_random_k(50, 5, 4).unwrap();
        for s in StrategyKind::ALL {
            let mut probe = Counters::default();
            let c = multiply_rowmajor_probed(&a, &b, s, &mut probe).unwrap();
            assert_eq!(probe.reserved, 1250);
            assert_eq!(probe.multiplications, 1250);
            assert!(probe.result_nnz <= probe.reserved);
            assert_eq!(probe.result_nnz, c.nnz());
            assert_eq!(probe.lines, 50);
            assert_eq!(probe.dirty_lines, 0);
            assert_eq!(probe.decisions.is_empty(), s != StrategyKind::Combined);
        }
    }
}
