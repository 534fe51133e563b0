use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::solvers::Trace;

/// `d_k = ‖x^k − x‖`.
pub fn distance_sequence(trace: &Trace, x: &Vector) -> Result<Vec<f64>> {
    x.ensure_dim(trace.dim())?;
    Ok(trace.iterates.iter().map(|p| p.distance(x)).collect())
}

/// `s_k = ⟨x1 − x2, x^k⟩`.
pub fn inner_product_sequence(trace: &Trace, x1: &Vector, x2: &Vector) -> Result<Vec<f64>> {
    x1.ensure_dim(trace.dim())?;
    x2.ensure_dim(trace.dim())?;
    let diff = x1 - x2;
    Ok(trace.iterates.iter().map(|p| diff.dot(p)).collect())
}

/// Largest `|s_{k+1} − s_k|` over the last `window` steps.
pub fn cauchy_tail_statistic(seq: &[f64], window: usize) -> Result<f64> {
    if window >= seq.len() {
        return Err(Error::InvalidParameter(format!(
            "window {window} must be shorter than the sequence ({})",
            seq.len()
        )));
    }
    let tail = &seq[seq.len() - 1 - window..];
    Ok(tail.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Checks `‖x^{k+1} − x‖² ≤ ‖x^k − x‖² − ρ‖x^{k+1} − x^k‖ + ε_k + tol` at every step.
pub fn check_strong_convergence_condition(
    trace: &Trace,
    x: &Vector,
    rho: f64,
    epsilons: &[f64],
    tol: f64,
) -> Result<ConditionCheck> {
    x.ensure_dim(trace.dim())?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    if let Some(&e) = epsilons.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::NegativeEpsilon(e));
    }
    let steps = trace.len() - 1;
    if epsilons.len() < steps {
        return Err(Error::LengthMismatch { expected: steps, found: epsilons.len() });
    }
    let first_violation = trace.iterates.windows(2).zip(epsilons).position(|(w, &e)| {
        let lhs = (&w[1] - x).norm_sq();
        let rhs = (&w[0] - x).norm_sq() - rho * w[1].distance(&w[0]) + e + tol;
        lhs > rhs
    });
    Ok(ConditionCheck { holds: first_violation.is_none(), first_violation })
}
