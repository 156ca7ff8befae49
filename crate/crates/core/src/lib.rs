//! Iterative solvers for the continuous Sylvester equation AX + XB = C.
//!
//! The centerpiece is the multiplicative splitting iteration (MSI): two
//! splittings of each coefficient matrix drive an outer sweep of two inner
//! Sylvester solves. Its HS + Jacobi specialization pairs a conjugate
//! gradient half-step with a closed-form diagonal half-step. The crate also
//! carries the convergence certificates for the method, HSS / restarted
//! GMRES / BiCGSTAB baselines running matrix-free over the Kronecker
//! operator, Matrix Market I/O, and a benchmark harness with problem
//! generators and CSV/JSON reporting.

pub mod baselines;
pub mod bench;
pub mod csr;
pub mod dense;
pub mod error;
pub mod inner;
pub mod kron;
pub mod matrix;
pub mod mm;
pub mod msi;
pub mod splitting;
pub mod theory;

mod nalg;
mod timer;

pub use csr::CsrMatrix;
pub use dense::{frobenius_norm, DenseMatrix};
pub use error::{Error, Result};
pub use matrix::{sylvester_residual, Matrix, SylvesterProblem};
pub use msi::{msi_solve_general, msi_solve_hs_jacobi, MsiConfig, MsiSplittings, SolveReport};
pub use splitting::{hs_split, jacobi_split, validate_spd, SplittingPair};
