//! Monotonicity diagnostics for iterate traces.
//!
//! A trace is classified against a finite [`AnchorSet`] standing in for the
//! target set. Step comparisons use the relative tolerance
//! `tol · (1 + ‖x^k − x‖)`; with `tol = 0` they are decided exactly for the
//! stored iterates.

mod anchors;
mod clusters;
mod fejer;
mod predicate;
mod quasi;
mod report;
mod sequences;

pub use anchors::AnchorSet;
pub use clusters::{
    check_cluster_hyperplane, check_cluster_midpoint_orthogonality, cluster_points, Cluster, ClusterReport,
    HyperplaneCheck, MidpointCheck,
};
pub use fejer::{
    check_fejer, check_fejer_star, check_fejer_star_convex_hull, fejer_star_index, first_violation, tail_radius,
    FejerResult, HullReport, HullSample,
};
pub use predicate::{increment_sign, increment_upper_bound, moves_away, squared_increment};
pub use quasi::{
    fit_quasi_fejer, quasi_fejer3_witness, verify_type3, EpsilonFit, QuasiFejerFit, QuasiFejerType, Summability,
    SUMMABLE_TAIL_RATIO,
};
pub use report::{analyze, AnchorReport, MonotonicityReport, UniformReport};
pub use sequences::{
    cauchy_tail_statistic, check_strong_convergence_condition, distance_sequence, inner_product_sequence,
    ConditionCheck,
};
