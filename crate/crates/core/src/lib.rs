//! Convex feasibility solvers and monotonicity diagnostics for iterate traces.
//!
//! The crate is organized around five pieces:
//!
//! - [`geometry`]: convex sets, exact projections, separating halfspaces.
//! - [`operators`]: projections, affine maps, convex combinations and
//!   compositions, plus sampled checks of contraction, nonexpansiveness,
//!   firm nonexpansiveness and nonexpansiveness plus.
//! - [`solvers`]: iteration engines producing [`solvers::Trace`]s, reachable by
//!   name through a [`solvers::SolverRegistry`].
//! - [`diagnostics`]: Fejér, Fejér* and quasi-Fejér (types I–III) checks,
//!   witnesses, scalar sequences and cluster analysis.
//! - [`gallery`]: reproducible fixture traces with known analytic behavior.
//!
//! ℝⁿ stands in for a general Hilbert space, so weak and strong cluster points
//! coincide everywhere in this crate.

pub mod diagnostics;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod operators;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::Vector;

/// Default relative tolerance; checks scale it as `tol · (1 + ‖·‖)`.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
