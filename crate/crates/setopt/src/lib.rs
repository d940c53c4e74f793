//! Numerical toolkit for set-valued analysis over polyhedral data.
//!
//! Sets are Motzkin-style `V + cone(R)` objects (a finite point cloud plus
//! recession-cone generators), set-valued maps are expression trees evaluating
//! to such sets, and the subdifferential notions for set-valued maps are tested
//! numerically through the excess functional on epigraphical maps.
//!
//! Module layout:
//! - [`kernel`]: dense LP (two-phase simplex) and active-set NNLS, the two
//!   numerical primitives everything else reduces to.
//! - [`geometry`]: membership, distance, excess, Minkowski sums on cloud+cone sets.
//! - [`cones`]: ordering-cone algebra, dual generator enumeration, scalarized
//!   inclusion checks.
//! - [`dsl`]: the JSON problem-file format and expression-tree evaluator.
//! - [`maps`]: set-valued map semantics, sampling schedules, regularity testers.
//! - [`subdiff`]: Fréchet / upper / limiting subdifferential membership tests
//!   and the calculus-rule verifiers (cancellation, sum, difference rules).
//! - [`optimize`]: set-order minimality checkers, penalization, grid solver,
//!   and the sharp-minimality necessary-condition report.
//! - [`suites`]: seeded randomized property suites shared by the CLI and the
//!   acceptance tests.

pub mod cones;
pub mod dsl;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod linop;
pub mod maps;
pub mod optimize;
pub mod subdiff;
pub mod suites;

pub use error::{Error, Result};
pub use linop::LinOp;

/// Library version string, echoed into CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
