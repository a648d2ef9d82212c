//! Sparse matrix-matrix multiplication kernels with pluggable result-storing
//! strategies, a bandwidth-based performance model and a benchmark harness.
//!
//! ```
//! use sparsemm::genmat::gen_fd;
//! use sparsemm::kernels::{multiply_rowmajor, StrategyKind};
//!
//! let a = gen_fd(8);
//! let c = multiply_rowmajor(&a, &a, StrategyKind::Combined).unwrap();
//! assert_eq!(c.rows(), 64);
//! ```

pub mod bench;
pub mod error;
pub mod formats;
pub mod genmat;
pub mod kernels;
pub mod perfmodel;

pub use error::{BuildError, Error, FormatError, Result};
pub use formats::{csc_to_csr, csr_to_csc, estimate_nnz, CscMatrix, CsrMatrix, SparseBuilder};
pub use kernels::StrategyKind;
