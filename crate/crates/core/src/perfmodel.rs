//! Flop accounting and the bandwidth-based light-speed model.
//!
//! A product `A * B` needs `sum_k colnnz_k(A) * rownnz_k(B)` multiplications;
//! additions are bounded by the same number, so flops are counted as twice
//! the multiplications (worst case).
//!
//! The attainable rate of a loop is bounded by `min(P_max, b_max / B_c)`,
//! where `B_c` is the loop's code balance in bytes per flop. The bound is an
//! upper limit, so the tighter of the two limbs applies.

use std::fmt;

use crate::error::{Error, Result};
use crate::formats::{check_dims, CsrMatrix};

/// Peak double precision rate of the single-core reference platform: one
/// multiply and one add per cycle at 3.8 GHz.
pub const REFERENCE_PEAK_FLOPS: f64 = 7.6e9;
/// L1 bandwidth of the reference platform (16 bytes per cycle at 3.8 GHz).
pub const REFERENCE_L1_BANDWIDTH: f64 = 60.8e9;
/// Memory bandwidth implied by the reported in-memory limit of 1140 MFlop/s
/// at 16 bytes/flop.
pub const REFERENCE_MEMORY_BANDWIDTH: f64 = 18.24e9;
/// STREAM-measured memory bandwidth quoted for the same platform.
pub const REFERENCE_STREAM_BANDWIDTH: f64 = 18.5e9;

/// Decimal flops per MFlop.
pub const FLOPS_PER_MFLOP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlopCount {
    pub multiplications: u64,
    pub flops: u64,
}

impl FlopCount {
    pub fn from_multiplications(multiplications: u64) -> Self {
        Self {
            multiplications,
            flops: 2 * multiplications,
        }
    }
}

/// Multiplications of `A * B`, summing `nnz(B row k)` over every stored
/// `a[r,k]`. O(nnz(A)).
pub fn count_mults(a: &CsrMatrix, b: &CsrMatrix) -> Result<FlopCount> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;
    let mut total = 0u64;
    for r in 0..a.rows() {
        for &k in a.row(r).0 {
            total += b.row_nnz(k) as u64;
        }
    }
    Ok(FlopCount::from_multiplications(total))
}

/// Same count computed literally from column occupancies of `A` and row
/// occupancies of `B`.
pub fn count_mults_by_columns(a: &CsrMatrix, b: &CsrMatrix) -> Result<FlopCount> {
    check_dims(a.rows(), a.cols(), b.rows(), b.cols())?;
    let mut col_nnz = vec![0u64; a.cols()];
    for &c in a.col_idx() {
        col_nnz[c] += 1;
    }
    let total = col_nnz
        .iter()
        .enumerate()
        .map(|(k, &ak)| ak * b.row_nnz(k) as u64)
        .sum();
    Ok(FlopCount::from_multiplications(total))
}

/// Machine and loop parameters of the light-speed model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RooflineParams {
    /// Peak arithmetic rate in flops/s.
    pub peak_flops: f64,
    /// Bandwidth of the relevant data path in bytes/s.
    pub bandwidth: f64,
    /// Code balance in bytes/flop.
    pub code_balance: f64,
}

impl RooflineParams {
    pub fn new(peak_flops: f64, bandwidth: f64, code_balance: f64) -> Result<Self> {
        for (name, v) in [
            ("peak", peak_flops),
            ("bandwidth", bandwidth),
            ("code balance", code_balance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            peak_flops,
            bandwidth,
            code_balance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limb {
    Compute,
    Bandwidth,
}

impl fmt::Display for Limb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Limb::Compute => "compute",
            Limb::Bandwidth => "bandwidth",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RooflineBound {
    pub flops_per_sec: f64,
    pub limb: Limb,
}

impl RooflineBound {
    pub fn mflops(&self) -> f64 {
        self.flops_per_sec / FLOPS_PER_MFLOP
    }
}

/// Light-speed bound `min(P_max, b_max / B_c)` and the limb that sets it.
pub fn roofline(params: &RooflineParams) -> RooflineBound {
    let memory_bound = params.bandwidth / params.code_balance;
    if params.peak_flops <= memory_bound {
        RooflineBound {
            flops_per_sec: params.peak_flops,
            limb: Limb::Compute,
        }
    } else {
        RooflineBound {
            flops_per_sec: memory_bound,
            limb: Limb::Bandwidth,
        }
    }
}

/// Traffic tally of the Gustavson inner loop `temp[j] += a * b[j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeBalance {
    /// Index of `b`, value of `b`, and `temp[j]`.
    pub loads: u32,
    /// `temp[j]`.
    pub stores: u32,
    pub bytes_per_access: u32,
    /// One multiply and one add.
    pub flops: u32,
    pub bytes_per_flop: f64,
}

pub fn inner_loop_balance() -> CodeBalance {
    let (loads, stores, bytes_per_access, flops) = (3, 1, 8, 2);
    CodeBalance {
        loads,
        stores,
        bytes_per_access,
        flops,
        bytes_per_flop: ((loads + stores) * bytes_per_access) as f64 / flops as f64,
    }
}

/// MFlop/s for `flops` work done in `seconds`.
pub fn mflops(flops: u64, seconds: f64) -> f64 {
    flops as f64 / seconds / FLOPS_PER_MFLOP
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmat::{gen_fd, gen_random_k};
    use crate::kernels::{multiply_rowmajor_probed, Counters, StrategyKind};
    use proptest::prelude::*;

    #[test]
    fn identity_count() {
        let i = CsrMatrix::identity(9);
        assert_eq!(
            count_mults(&i, &i).unwrap(),
            FlopCount {
                multiplications: 9,
                flops: 18
            }
        );
    }

    #[test]
    fn fd_grid2_count() {
        let fd = gen_fd(2);
        let count = count_mults(&fd, &fd).unwrap();
        assert_eq!(
            count,
            FlopCount {
                multiplications: 36,
                flops: 72
            }
        );
        assert_eq!(count_mults_by_columns(&fd, &fd).unwrap(), count);
    }

    #[test]
    fn random_count_matches_kernel_counter() {
        let a = gen_random_k(64, 5, 1).unwrap();
        let b = gen_random_k(64, 5, 2).unwrap();
        let mut probe = Counters::default();
        multiply_rowmajor_probed(&a, &b, StrategyKind::Combined, &mut probe).unwrap();
        assert_eq!(
            count_mults(&a, &b).unwrap().multiplications,
            probe.multiplications
        );
    }

    #[test]
    fn reference_bounds() {
        let l1 = roofline(&RooflineParams::new(7.6e9, 60.8e9, 16.0).unwrap());
        assert_eq!(l1.flops_per_sec, 3.8e9);
        assert_eq!(l1.mflops(), 3800.0);
        assert_eq!(l1.limb, Limb::Bandwidth);

        let mem = roofline(&RooflineParams::new(7.6e9, 18.24e9, 16.0).unwrap());
        assert_eq!(mem.mflops(), 1140.0);

        let compute = roofline(&RooflineParams::new(1e9, 1e99, 16.0).unwrap());
        assert_eq!(compute.flops_per_sec, 1e9);
        assert_eq!(compute.limb, Limb::Compute);
    }

    #[test]
    fn balance_tally() {
        let b = inner_loop_balance();
        assert_eq!(b.bytes_per_flop, 16.0);
        assert_eq!((b.loads + b.stores) * b.bytes_per_access, 32);
        let bound = roofline(
            &RooflineParams::new(
                REFERENCE_PEAK_FLOPS,
                REFERENCE_L1_BANDWIDTH,
                b.bytes_per_flop,
            )
            .unwrap(),
        );
        assert_eq!(bound.mflops(), 3800.0);
    }

    #[test]
    fn params_must_be_positive() {
        assert!(RooflineParams::new(0.0, 1.0, 1.0).is_err());
        assert!(RooflineParams::new(1.0, -1.0, 1.0).is_err());
        assert!(RooflineParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn rate_arithmetic() {
        assert!((mflops(72, 1e-6) - 72.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn roofline_is_monotone(
            peak in 1e6f64..1e12, bw in 1e6f64..1e12, bc in 0.1f64..64.0, f in 1.0f64..4.0,
        ) {
            let base = roofline(&RooflineParams::new(peak, bw, bc).unwrap()).flops_per_sec;
            prop_assert!(roofline(&RooflineParams::new(peak * f, bw, bc).unwrap()).flops_per_sec >= base);
            prop_assert!(roofline(&RooflineParams::new(peak, bw * f, bc).unwrap()).flops_per_sec >= base);
            prop_assert!(roofline(&RooflineParams::new(peak, bw, bc * f).unwrap()).flops_per_sec <= base);
        }

        #[test]
        fn two_counting_routes_agree(n in 1usize..60, ka in 1usize..6, kb in 1usize..6, seed: u64) {
            let a = gen_random_k(n, ka.min(n), seed).unwrap();
            let b = gen_random_k(n, kb.min(n), seed ^ 1).unwrap();
            prop_assert_eq!(count_mults(&a, &b).unwrap(), count_mults_by_columns(&a, &b).unwrap());
        }
    }
}
