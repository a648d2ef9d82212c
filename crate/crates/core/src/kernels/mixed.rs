use super::{multiply_colmajor_probed, multiply_rowmajor_probed, Probe, StrategyKind};
use crate::error::Result;
use crate::formats::{check_dims, csc_to_csr, csr_to_csc, CscMatrix, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajorOrder {
    Row,
    Col,
}

/// A matrix in either compressed format.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Csr(CsrMatrix),
    Csc(CscMatrix),
}

impl AnyMatrix {
    pub fn order(&self) -> MajorOrder {
        match self {
            AnyMatrix::Csr(_) => MajorOrder::Row,
            AnyMatrix::Csc(_) => MajorOrder::Col,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            AnyMatrix::Csr(m) => m.rows(),
            AnyMatrix::Csc(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyMatrix::Csr(m) => m.cols(),
            AnyMatrix::Csc(m) => m.cols(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            AnyMatrix::Csr(m) => m.nnz(),
            AnyMatrix::Csc(m) => m.nnz(),
        }
    }

    /// The same matrix in the requested format (cloned when it already is).
    pub fn to_order(&self, order: MajorOrder) -> AnyMatrix {
        match (self, order) {
            (AnyMatrix::Csr(m), MajorOrder::Col) => AnyMatrix::Csc(csr_to_csc(m)),
            (AnyMatrix::Csc(m), MajorOrder::Row) => AnyMatrix::Csr(csc_to_csr(m)),
            _ => self.clone(),
        }
    }

    pub fn into_csr(self) -> CsrMatrix {
        match self {
            AnyMatrix::Csr(m) => m,
            AnyMatrix::Csc(m) => csc_to_csr(&m),
        }
    }
}

/// `C = A * B` for any format pair, returned in `A`'s major order.
///
/// Same-major pairs go straight to the row- or column-major kernel. A mixed
/// pair converts `B` to `A`'s order first, so at most one conversion happens.
pub fn multiply_mixed(a: &AnyMatrix, b: &AnyMatrix, strategy: StrategyKind) -> Result<AnyMatrix> {
    multiply_mixed_probed(a, b, strategy, &mut ())
}

pub fn multiply_mixed_probed<P: Probe>(
    a: &AnyMatrix,
    b: &AnyMatrix,
    strategy: StrategyKind,
    probe: &mut P,
) -> Result<AnyMatrix> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;
    Ok(match (a, b) {
        (AnyMatrix::Csr(a), AnyMatrix::Csr(b)) => {
            AnyMatrix::Csr(multiply_rowmajor_probed(a, b, strategy, probe)?)
        }
        (AnyMatrix::Csr(a), AnyMatrix::Csc(b)) => {
            probe.conversion();
            let b = csc_to_csr(b);
            AnyMatrix::Csr(multiply_rowmajor_probed(a, &b, strategy, probe)?)
        }
        (AnyMatrix::Csc(a), AnyMatrix::Csr(b)) => {
            probe.conversion();
            let b = csr_to_csc(b);
            AnyMatrix::Csc(multiply_colmajor_probed(a, &b, strategy, probe)?)
        }
        (AnyMatrix::Csc(a), AnyMatrix::Csc(b)) => {
            AnyMatrix::Csc(multiply_colmajor_probed(a, b, strategy, probe)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmat::gen_random_k;
    use crate::kernels::{multiply_colmajor, multiply_rowmajor, Counters};

    fn operands() -> (CsrMatrix, CsrMatrix) {
        (
            gen_random_k(30, 5, 1).unwrap(),
            gen_random_k(30, 5, 2).unwrap(),
        )
    }

    #[test]
    fn same_major_needs_no_conversion() {
        let (a, b) = operands();
        for order in [MajorOrder::Row, MajorOrder::Col] {
            let (am, bm) = (
                AnyMatrix::Csr(a.clone()).to_order(order),
                AnyMatrix::Csr(b.clone()).to_order(order),
            );
            let mut probe = Counters::default();
            let c = multiply_mixed_probed(&am, &bm, StrategyKind::Combined, &mut probe).unwrap();
            assert_eq!(probe.conversions, 0);
            assert_eq!(c.order(), order);
        }
    }

    #[test]
    fn csr_csc_converts_rhs_once() {
        let (a, b) = operands();
        let bc = csr_to_csc(&b);
        let mut probe = Counters::default();
        let c = multiply_mixed_probed(
            &AnyMatrix::Csr(a.clone()),
            &AnyMatrix::Csc(bc.clone()),
            StrategyKind::Sort,
            &mut probe,
        )
        .unwrap();
        assert_eq!(probe.conversions, 1);
        let expected = multiply_rowmajor(&a, &csc_to_csr(&bc), StrategyKind::Sort).unwrap();
        match c {
            AnyMatrix::Csr(c) => assert!(c.bits_eq(&expected)),
            AnyMatrix::Csc(_) => panic!("result must follow A's order"),
        }
    }

    #[test]
    fn csc_csr_converts_rhs_once() {
        let (a, b) = operands();
        let ac = csr_to_csc(&a);
        let mut probe = Counters::default();
        let c = multiply_mixed_probed(
            &AnyMatrix::Csc(ac.clone()),
            &AnyMatrix::Csr(b.clone()),
            StrategyKind::MinMax,
            &mut probe,
        )
        .unwrap();
        assert_eq!(probe.conversions, 1);
        let expected = multiply_colmajor(&ac, &csr_to_csc(&b), StrategyKind::MinMax).unwrap();
        match c {
            AnyMatrix::Csc(c) => assert!(c.bits_eq(&expected)),
            AnyMatrix::Csr(_) => panic!("result must follow A's order"),
        }
    }

    #[test]
    fn mismatch_is_checked_before_conversion() {
        let a = AnyMatrix::Csr(CsrMatrix::zeros(2, 3));
        let b = AnyMatrix::Csc(CscMatrix::zeros(2, 3));
        let mut probe = Counters::default();
        assert!(multiply_mixed_probed(&a, &b, StrategyKind::Sort, &mut probe).is_err());
        assert_eq!(probe.conversions, 0);
    }
}
