use rand::Rng;
use serde::{Deserialize, Serialize};

use super::predicate::moves_away;
use super::AnchorSet;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::sampling;
use crate::solvers::Trace;

/// Outcome of the Fejér check for one anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerResult {
    pub anchor: Vector,
    pub monotone: bool,
    pub first_violation: Option<usize>,
}

pub(crate) fn require_len(trace: &Trace, needed: usize) -> Result<()> {
    if trace.len() < needed {
        return Err(Error::TraceTooShort { needed, found: trace.len() });
    }
    Ok(())
}

pub(crate) fn require_dims(trace: &Trace, anchors: &AnchorSet) -> Result<()> {
    anchors.points[0].ensure_dim(trace.dim())
}

/// Indices `k` whose step `x^k → x^{k+1}` moves away from `x`.
fn violations<'a>(trace: &'a Trace, x: &'a Vector, tol: f64) -> impl DoubleEndedIterator<Item = usize> + 'a {
    trace
        .iterates
        .windows(2)
        .enumerate()
        .filter(move |(_, w)| moves_away(&w[1], &w[0], x, tol))
        .map(|(k, _)| k)
}

pub fn first_violation(trace: &Trace, x: &Vector, tol: f64) -> Option<usize> {
    violations(trace, x, tol).next()
}

/// Minimal Fejér* index of a single point; `None` when the last step violates.
pub fn fejer_star_index(trace: &Trace, x: &Vector, tol: f64) -> Option<usize> {
    match violations(trace, x, tol).next_back() {
        None => Some(0),
        Some(k) if k + 2 >= trace.len() => None,
        Some(k) => Some(k + 1),
    }
}

/// Per-anchor test of `‖x^{k+1} − x‖ ≤ ‖x^k − x‖ + tol·(1 + ‖x^k − x‖)` for every `k`.
pub fn check_fejer(trace: &Trace, anchors: &AnchorSet, tol: f64) -> Result<Vec<FejerResult>> {
    require_len(trace, 2)?;
    require_dims(trace, anchors)?;
    Ok(anchors
        .iter()
        .map(|a| {
            let first = first_violation(trace, a, tol);
            FejerResult { anchor: a.clone(), monotone: first.is_none(), first_violation: first }
        })
        .collect())
}

/// Per-anchor minimal `N(x)` from which the Fejér inequality holds to the end of the trace.
pub fn check_fejer_star(trace: &Trace, anchors: &AnchorSet, tol: f64) -> Result<Vec<Option<usize>>> {
    require_len(trace, 2)?;
    require_dims(trace, anchors)?;
    Ok(anchors.iter().map(|a| fejer_star_index(trace, a, tol)).collect())
}

/// One random convex combination of anchors and its Fejér* index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullSample {
    pub point: Vector,
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullReport {
    pub samples: Vec<HullSample>,
    pub absent: usize,
    pub max_n: Option<usize>,
}

/// Fejér* indices at `num_combinations` seeded random convex combinations.
/// Each draw picks a random nonempty subset of anchors and simplex weights on it.
pub fn check_fejer_star_convex_hull(
    trace: &Trace,
    anchors: &AnchorSet,
    num_combinations: usize,
    seed: u64,
    tol: f64,
) -> Result<HullReport> {
    if num_combinations == 0 {
        return Err(Error::InvalidParameter("num_combinations must be at least 1".into()));
    }
    require_len(trace, 2)?;
    require_dims(trace, anchors)?;
    let mut rng = sampling::rng(seed);
    let m = anchors.len();
    let mut samples = Vec::with_capacity(num_combinations);
    for _ in 0..num_combinations {
        let size = rng.gen_range(1..=m);
        let mut support = rand::seq::index::sample(&mut rng, m, size).into_vec();
        support.sort_unstable();
        let weights = sampling::simplex_weights(&mut rng, size);
        let pts: Vec<Vector> = support.iter().map(|&i| anchors.points[i].clone()).collect();
        let point = sampling::convex_combination(&pts, &weights);
        let n = fejer_star_index(trace, &point, tol);
        samples.push(HullSample { point, support, weights, n });
    }
    let absent = samples.iter().filter(|s| s.n.is_none()).count();
    let max_n = samples.iter().filter_map(|s| s.n).max();
    Ok(HullReport { samples, absent, max_n })
}

/// Radius of the ball around `anchor` that holds every iterate from `n` on:
/// `‖x^n − anchor‖`. Iterates at `k ≥ n` satisfy `‖x^k‖ ≤ ‖anchor‖ + radius` when
/// `n` is a Fejér* index of `anchor`.
pub fn tail_radius(trace: &Trace, anchor: &Vector, n: usize) -> f64 {
    trace.iterates[n.min(trace.len() - 1)].distance(anchor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn trace(points: &[[f64; 2]]) -> Trace {
        Trace::from_iterates(points.iter().map(|p| vector![p[0], p[1]]).collect()).unwrap()
    }

    #[test]
    fn constant_trace_is_fejer() {
        let t = trace(&[[1.0, 1.0]; 5]);
        let a = AnchorSet::new("a", vec![vector![0.0, 0.0], vector![3.0, -2.0]]).unwrap();
        assert!(check_fejer(&t, &a, 0.0).unwrap().iter().all(|r| r.monotone));
        assert_eq!(check_fejer_star(&t, &a, 0.0).unwrap(), vec![Some(0), Some(0)]);
    }

    #[test]
    fn star_index_is_minimal() {
        let t = trace(&[[0.0, 2.0], [1.0, 2.0], [0.0, 1.9], [0.0, 1.8]]);
        let o = AnchorSet::singleton("o", vector![0.0, 0.0]);
        assert_eq!(check_fejer(&t, &o, 0.0).unwrap()[0].first_violation, Some(0));
        assert_eq!(check_fejer_star(&t, &o, 0.0).unwrap(), vec![Some(1)]);
        let last = trace(&[[0.0, 2.0], [0.0, 1.0], [0.0, 3.0]]);
        assert_eq!(check_fejer_star(&last, &o, 0.0).unwrap(), vec![None]);
    }

    #[test]
    fn preconditions() {
        let one = trace(&[[0.0, 0.0]]);
        let o = AnchorSet::singleton("o", vector![0.0, 0.0]);
        assert!(matches!(check_fejer(&one, &o, 0.0), Err(Error::TraceTooShort { .. })));
        let t = trace(&[[0.0, 0.0], [1.0, 0.0]]);
        let bad = AnchorSet::singleton("b", vector![0.0]);
        assert!(matches!(check_fejer_star(&t, &bad, 0.0), Err(Error::DimensionMismatch { .. })));
        assert!(check_fejer_star_convex_hull(&t, &o, 0, 1, 0.0).is_err());
    }

    #[test]
    fn single_anchor_hull_reduces_to_vertex() {
        let t = trace(&[[0.0, 2.0], [1.0, 2.0], [0.0, 1.9], [0.0, 1.8]]);
        let o = AnchorSet::singleton("o", vector![0.0, 0.0]);
        let r = check_fejer_star_convex_hull(&t, &o, 5, 3, 0.0).unwrap();
        assert!(r.samples.iter().all(|s| s.n == Some(1) && s.point == vector![0.0, 0.0]));
    }
}
