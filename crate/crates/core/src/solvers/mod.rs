//! Iteration engines for convex feasibility and fixed-point problems.
//!
//! Every engine returns a [`Trace`]; the [`SolverRegistry`] exposes them by
//! name (`fixed-point`, `simultaneous`, `sequential`, `inner-approx`).

mod engines;
mod registry;
mod schedule;
mod trace;

pub use engines::{inner_approx_separating, iterate_fixed_point, sequential_projections, simultaneous_projections};
pub use registry::{Problem, SolveOptions, Solver, SolverRegistry};
pub use schedule::{EpsilonSchedule, IndexControl, StopRule};
pub use trace::{StepRecord, TerminationStatus, Trace};
