use serde::{Deserialize, Serialize};

use super::fejer::{fejer_star_index, first_violation, require_dims, require_len};
use super::quasi::{fit_quasi_fejer, quasi_fejer3_witness, EpsilonFit, QuasiFejerType};
use super::AnchorSet;
use crate::error::Result;
use crate::geometry::Vector;
use crate::solvers::Trace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorReport {
    pub anchor: Vector,
    pub fejer: bool,
    pub first_violation_index: Option<usize>,
    pub fejer_star_n: Option<usize>,
    pub type3_epsilons: Vec<f64>,
    pub type3_partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformReport {
    pub type1: EpsilonFit,
    pub type2: EpsilonFit,
}

/// Monotonicity classification of one trace against an anchor set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub label: String,
    pub tol: f64,
    pub trace_len: usize,
    pub per_point: Vec<AnchorReport>,
    pub uniform: UniformReport,
}

impl MonotonicityReport {
    pub fn fejer_star_indices(&self) -> Vec<Option<usize>> {
        self.per_point.iter().map(|p| p.fejer_star_n).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs every per-anchor and uniform check. When an anchor has a Fejér*
/// index its Type III sequence is the witness built from that index;
/// otherwise it is the plain positive-part fit.
pub fn analyze(trace: &Trace, anchors: &AnchorSet, tol: f64) -> Result<MonotonicityReport> {
    require_len(trace, 2)?;
    require_dims(trace, anchors)?;
    let type3 = fit_quasi_fejer(trace, anchors, QuasiFejerType::III)?;
    let per_point = anchors
        .iter()
        .zip(type3.fits)
        .map(|(a, fit)| {
            let first = first_violation(trace, a, tol);
            let n = if first.is_none() { Some(0) } else { fejer_star_index(trace, a, tol) };
            let eps = match n {
                Some(n) => quasi_fejer3_witness(trace, a, n, tol)?,
                None => fit.epsilons,
            };
            Ok(AnchorReport {
                anchor: a.clone(),
                fejer: first.is_none(),
                first_violation_index: first,
                fejer_star_n: n,
                type3_partial_sum: eps.iter().sum(),
                type3_epsilons: eps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut uniform = fit_quasi_fejer(trace, anchors, QuasiFejerType::I)?.fits;
    let type1 = uniform.remove(0);
    let type2 = fit_quasi_fejer(trace, anchors, QuasiFejerType::II)?.fits.remove(0);
    Ok(MonotonicityReport {
        label: anchors.label.clone(),
        tol,
        trace_len: trace.len(),
        per_point,
        uniform: UniformReport { type1, type2 },
    })
}
