//! Numerical kernels: dense LP and nonnegative least squares.
//!
//! Problem sizes throughout the crate are tiny (a few dozen variables), so a
//! textbook two-phase simplex and an active-set NNLS are used, both allocating
//! per call and safe for concurrent use.

pub mod lp;
pub mod nnls;

/// Default feasibility tolerance for the LP kernel.
pub const LP_TOL: f64 = 1e-9;
/// Default tolerance for NNLS-based distances.
pub const DIST_TOL: f64 = 1e-8;
