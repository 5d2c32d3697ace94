//! Solvers for equivariant Yang-Mills connections on sphere joins.
//!
//! The sphere `S^{m1+m2+1}` is the join of `S^{m1}` and `S^{m2}`, a doubly
//! warped product over `[0, pi/2]`. Pulling back the tangent bundle of the
//! target join through a pair of eigenmaps reduces the Yang-Mills equation
//! to a system of two singular ODEs for profile functions `(alpha, beta)`,
//! critical points of a weighted one-dimensional energy `J`. This crate
//! evaluates that energy, solves the boundary value problems by projected
//! minimization and by shooting in the log-tangent coordinate, checks the
//! analytic damping (existence) conditions, and reconstructs curvature data
//! from solved profiles.
//!
//! Modules map onto the pipeline:
//!
//! * [`eigenmaps`] - the homogeneous building blocks and their `(lambda, mu)` data
//! * [`grid`] / [`profile`] - discretization of profiles on `(0, pi/2)` or `(-pi/2, pi/2)`
//! * [`functional`] - the reduced energy, its discrete gradient and second variation
//! * [`ode`] - Euler-Lagrange residuals, the log-tangent substitution, indicial exponents
//! * [`geometry`] - pointwise curvature norms and the energy identity
//! * [`solvers`] - minimization and shooting drivers
//! * [`damping`] - the analytic existence conditions and parameter sweeps
//! * [`results`] - persisted result documents and independent re-verification

// index-based loops read better in the stencil/assembly code, and the
// negated comparisons deliberately reject NaN parameters
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod damping;
pub mod eigenmaps;
pub mod exact;
pub mod functional;
pub mod geometry;
pub mod grid;
pub mod numerics;
pub mod ode;
pub mod profile;
pub mod results;
pub mod solvers;

pub use eigenmaps::Eigenmap;
pub use functional::{JoinProblem, SuspensionProblem};
pub use grid::Grid;
pub use profile::{Profile, SuspensionProfile};

/// Errors shared across the solver suite.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid eigenmap: {0}")]
    Eigenmap(String),
    #[error("dimension formula overflow for (m, ell) = ({m}, {ell}): n does not fit in u64")]
    DimensionOverflow { m: u32, ell: u32 },
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("shooting branch not found: {0}")]
    BranchNotFound(String),
    #[error("verification failure: {0}")]
    Verification(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
