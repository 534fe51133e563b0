//! Closed convex sets of ℝⁿ, their projections and membership tests, and the
//! separating halfspaces used to approximate sublevel sets from the inside.

mod oracle;
mod set;
mod vector;

pub use oracle::{ConvexFnOracle, OracleCheck, OracleFamily, OracleRegistry};
pub use set::{default_tol, inner_approximation, scaled_tol, separating_halfspace, ConvexSetSpec};
pub use vector::Vector;

/// Free-function form of [`ConvexSetSpec::project`].
pub fn project(set: &ConvexSetSpec, x: &Vector) -> crate::Result<Vector> {
    set.project(x)
}

/// Free-function form of [`ConvexSetSpec::contains`].
pub fn contains(set: &ConvexSetSpec, x: &Vector, tol: f64) -> crate::Result<bool> {
    set.contains(x, tol)
}
