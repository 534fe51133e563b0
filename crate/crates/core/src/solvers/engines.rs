use serde_json::json;

use super::{EpsilonSchedule, IndexControl, StepRecord, StopRule, TerminationStatus, Trace};
use crate::error::{Error, Result};
use crate::geometry::{separating_halfspace, ConvexFnOracle, ConvexSetSpec, Vector};
use crate::operators::OperatorSpec;

fn stop_params(trace: Trace, stop: &StopRule) -> Trace {
    trace
        .with_param("max_iters", stop.max_iters)
        .with_param("residual_tol", stop.residual_tol)
        .with_param("feasibility_tol", stop.feasibility_tol)
}

fn check_projectable(sets: &[ConvexSetSpec]) -> Result<()> {
    if sets.is_empty() {
        return Err(Error::EmptyProblem);
    }
    for s in sets {
        match s {
            ConvexSetSpec::Sublevel(_) | ConvexSetSpec::Intersection(_) => return Err(Error::UnsupportedSet(s.kind())),
            _ => s.validate()?,
        }
    }
    Ok(())
}

fn all_contain(sets: &[ConvexSetSpec], x: &Vector, tol: f64) -> Result<bool> {
    for s in sets {
        if !s.contains(x, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `x^{k+1} = T(x^k)` until the step length drops to `residual_tol`.
pub fn iterate_fixed_point(op: &OperatorSpec, x0: &Vector, stop: &StopRule) -> Result<Trace> {
    stop.validate()?;
    if let Some(d) = op.dim() {
        x0.ensure_dim(d)?;
    }
    let mut trace = stop_params(Trace::new("fixed-point", x0.clone()), stop);
    trace.status = TerminationStatus::Budget;
    for _ in 0..stop.max_iters {
        let next = op.apply(trace.last())?;
        let residual = next.distance(trace.last());
        trace.push(next, StepRecord { residual, ..Default::default() });
        if residual <= stop.residual_tol {
            trace.status = TerminationStatus::ResidualTolerance;
            break;
        }
    }
    Ok(trace)
}

/// Shared loop of the two projection methods: one trace entry per application
/// of `op`, stopping on feasibility, then on residual, then on budget.
fn run_projection_method(
    name: &str,
    op: &OperatorSpec,
    sets: &[ConvexSetSpec],
    x0: &Vector,
    stop: &StopRule,
) -> Result<Trace> {
    let mut trace = stop_params(Trace::new(name, x0.clone()), stop).with_param("num_sets", sets.len());
    trace.status = TerminationStatus::Budget;
    for _ in 0..stop.max_iters {
        let next = op.apply(trace.last())?;
        let residual = next.distance(trace.last());
        trace.push(next, StepRecord { residual, ..Default::default() });
        if all_contain(sets, trace.last(), stop.feasibility_tol)? {
            trace.status = TerminationStatus::Feasible;
            break;
        }
        if residual <= stop.residual_tol {
            trace.status = TerminationStatus::ResidualTolerance;
            break;
        }
    }
    Ok(trace)
}

/// Iterates `P̄ = Σ α_i P_{C_i}`.
pub fn simultaneous_projections(
    sets: &[ConvexSetSpec],
    weights: &[f64],
    x0: &Vector,
    stop: &StopRule,
) -> Result<Trace> {
    stop.validate()?;
    check_projectable(sets)?;
    if weights.len() != sets.len() {
        return Err(Error::LengthMismatch { expected: sets.len(), found: weights.len() });
    }
    let op = OperatorSpec::convex_combination(
        weights.iter().zip(sets).map(|(&w, s)| (w, OperatorSpec::projection(s.clone()))).collect(),
    )?;
    if let Some(d) = op.dim() {
        x0.ensure_dim(d)?;
    }
    let trace = run_projection_method("simultaneous", &op, sets, x0, stop)?;
    Ok(trace.with_param("weights", weights.to_vec()))
}

/// Iterates the full sweep `P̂ = P_{C_m} ∘ ⋯ ∘ P_{C_1}` in input order.
pub fn sequential_projections(sets: &[ConvexSetSpec], x0: &Vector, stop: &StopRule) -> Result<Trace> {
    stop.validate()?;
    check_projectable(sets)?;
    let op = OperatorSpec::composition(sets.iter().cloned().map(OperatorSpec::projection).collect())?;
    if let Some(d) = op.dim() {
        x0.ensure_dim(d)?;
    }
    let trace = run_projection_method("sequential", &op, sets, x0, stop)?;
    Ok(trace.with_param("sweep_order", (0..sets.len()).collect::<Vec<_>>()))
}

/// Projections onto halfspaces separating `x^k` from the inner approximations
/// `{g_i + ε_k ≤ 0}`.
///
/// Stops with [`TerminationStatus::FinitelyConvergent`] as soon as an iterate
/// satisfies `g_i ≤ feasibility_tol` for every `i`, checked before each step.
/// A step whose selected constraint is already ε-satisfied is a null step: the
/// iterate is repeated and the schedule advances.
pub fn inner_approx_separating(
    fns: &[ConvexFnOracle],
    x0: &Vector,
    schedule: &EpsilonSchedule,
    control: IndexControl,
    stop: &StopRule,
) -> Result<Trace> {
    stop.validate()?;
    if fns.is_empty() {
        return Err(Error::EmptyProblem);
    }
    schedule.validate()?;
    if !schedule.is_vanishing() {
        return Err(Error::InvalidParameter(
            "inner approximation needs a positive vanishing schedule (harmonic or geometric)".into(),
        ));
    }
    for g in fns {
        g.check_dim(x0)?;
    }
    let mut trace = stop_params(Trace::new("inner-approx", x0.clone()), stop)
        .with_param("schedule", json!(schedule))
        .with_param("control", control.to_string())
        .with_param("num_constraints", fns.len());
    let mut k = 0usize;
    loop {
        let x = trace.last().clone();
        let values: Vec<f64> = fns.iter().map(|g| g.value(&x)).collect();
        if values.iter().all(|&v| v <= stop.feasibility_tol) {
            trace.status = TerminationStatus::FinitelyConvergent;
            break;
        }
        if k == stop.max_iters {
            trace.status = TerminationStatus::Budget;
            break;
        }
        let eps = schedule.epsilon(k);
        let i = match control {
            IndexControl::Cyclic => k % fns.len(),
            IndexControl::MostViolated => {
                values.iter().enumerate().fold(0, |best, (j, v)| if *v > values[best] { j } else { best })
            }
        };
        if values[i] + eps <= 0.0 {
            trace.push(x, StepRecord { active_index: Some(i), epsilon: Some(eps), residual: 0.0, null_step: true });
        } else {
            let h = separating_halfspace(&fns[i], &x, eps)?;
            let next = h.project(&x)?;
            let residual = next.distance(&x);
            trace.push(next, StepRecord { active_index: Some(i), epsilon: Some(eps), residual, null_step: false });
        }
        k += 1;
    }
    Ok(trace)
}
