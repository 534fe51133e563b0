use serde::{Deserialize, Serialize};

use super::AnchorSet;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::solvers::Trace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub representative: Vector,
    pub member_indices: Vec<usize>,
}

impl Cluster {
    pub fn mean(&self, trace: &Trace) -> Vector {
        let n = self.member_indices.len() as f64;
        let mut acc = Vector::zeros(trace.dim());
        for &i in &self.member_indices {
            acc = &acc + &trace.iterates[i];
        }
        acc.map(|v| v / n)
    }
}

/// Cluster points of a trace's tail. In finite dimensions weak and strong
/// cluster points coincide, so this report serves both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub tail_start: usize,
    pub clusters: Vec<Cluster>,
    pub is_convergent: bool,
    pub limit_estimate: Option<Vector>,
}

/// Greedy radius clustering of the last `ceil(tail_fraction · len)` iterates,
/// visited in trace order. Each point joins the first cluster whose
/// representative lies within `radius`, otherwise it founds a new one.
pub fn cluster_points(trace: &Trace, tail_fraction: f64, radius: f64) -> Result<ClusterReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let len = trace.len();
    let count = ((tail_fraction * len as f64).ceil() as usize).clamp(1, len);
    let tail_start = len - count;
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, x) in trace.iterates.iter().enumerate().skip(tail_start) {
        match clusters.iter_mut().find(|c| c.representative.distance(x) <= radius) {
            Some(c) => c.member_indices.push(i),
            None => clusters.push(Cluster { representative: x.clone(), member_indices: vec![i] }),
        }
    }
    let is_convergent = clusters.len() == 1;
    let limit_estimate = is_convergent.then(|| clusters[0].mean(trace));
    Ok(ClusterReport { tail_start, clusters, is_convergent, limit_estimate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneCheck {
    pub alpha: f64,
    pub max_deviation: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointCheck {
    pub max_deviation: f64,
    pub passes: bool,
}

fn cluster_direction(w1: &Vector, w2: &Vector, anchors: &AnchorSet, tol: f64) -> Result<Vector> {
    w1.ensure_dim(anchors.dim())?;
    w2.ensure_dim(anchors.dim())?;
    let gap = w1.distance(w2);
    if gap <= tol {
        return Err(Error::DegenerateClusterPair(gap));
    }
    Ok(w1 - w2)
}

/// Whether all anchors lie on one hyperplane `{y : ⟨y, w1 − w2⟩ = α}`.
pub fn check_cluster_hyperplane(w1: &Vector, w2: &Vector, anchors: &AnchorSet, tol: f64) -> Result<HyperplaneCheck> {
    let dir = cluster_direction(w1, w2, anchors, tol)?;
    let values: Vec<f64> = anchors.iter().map(|y| y.dot(&dir)).collect();
    let alpha = values.iter().sum::<f64>() / values.len() as f64;
    let max_deviation = values.iter().map(|v| (v - alpha).abs()).fold(0.0, f64::max);
    Ok(HyperplaneCheck { alpha, max_deviation, passes: max_deviation <= tol * (1.0 + alpha.abs()) })
}

/// Largest `|⟨y − (w1 + w2)/2, w1 − w2⟩|` over the anchors.
pub fn check_cluster_midpoint_orthogonality(
    w1: &Vector,
    w2: &Vector,
    anchors: &AnchorSet,
    tol: f64,
) -> Result<MidpointCheck> {
    let dir = cluster_direction(w1, w2, anchors, tol)?;
    let mid = w1.lerp(w2, 0.5);
    let max_deviation = anchors.iter().map(|y| (y - &mid).dot(&dir).abs()).fold(0.0, f64::max);
    Ok(MidpointCheck { max_deviation, passes: max_deviation <= tol * (1.0 + dir.norm_sq()) })
}
