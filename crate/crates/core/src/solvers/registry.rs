use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use super::{engines, EpsilonSchedule, IndexControl, StopRule, Trace};
use crate::error::{Error, Result};
use crate::geometry::{ConvexFnOracle, ConvexSetSpec, OracleRegistry, Vector};
use crate::operators::OperatorSpec;

/// Everything a solver might need; each solver reads only its own fields.
#[derive(Debug, Clone)]
pub struct Problem {
    pub x0: Vector,
    pub sets: Vec<ConvexSetSpec>,
    pub weights: Option<Vec<f64>>,
    pub oracles: Vec<ConvexFnOracle>,
    pub operator: Option<OperatorSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    x0: Vector,
    #[serde(default)]
    sets: Vec<ConvexSetSpec>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    oracles: Vec<Value>,
    #[serde(default)]
    operator: Option<OperatorSpec>,
}

impl Problem {
    pub fn new(x0: Vector) -> Self {
        Problem { x0, sets: Vec::new(), weights: None, oracles: Vec::new(), operator: None }
    }

    /// Parses a problem document. Oracles are named built-in families, e.g.
    /// `{"family": "ball", "center": [0.5, 0], "radius": 1}`.
    pub fn from_json(s: &str, oracles: &OracleRegistry) -> Result<Self> {
        let doc: ProblemDoc = serde_json::from_str(s)?;
        Ok(Problem {
            x0: doc.x0,
            sets: doc.sets,
            weights: doc.weights,
            oracles: doc.oracles.iter().map(|o| oracles.build(o)).collect::<Result<_>>()?,
            operator: doc.operator,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub stop: StopRule,
    pub schedule: EpsilonSchedule,
    pub control: IndexControl,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            stop: StopRule::default(),
            schedule: EpsilonSchedule::Harmonic { scale: 1.0 },
            control: IndexControl::MostViolated,
        }
    }
}

/// An iteration engine selectable by name.
pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn solve(&self, problem: &Problem, options: &SolveOptions) -> Result<Trace>;
}

struct FixedPoint;
struct Simultaneous;
struct Sequential;
struct InnerApprox;

impl Solver for FixedPoint {
    fn name(&self) -> &'static str {
        "fixed-point"
    }

    fn description(&self) -> &'static str {
        "iterate the problem's operator"
    }

    fn solve(&self, problem: &Problem, options: &SolveOptions) -> Result<Trace> {
        let op = problem
            .operator
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("fixed-point needs an `operator`".into()))?;
        engines::iterate_fixed_point(op, &problem.x0, &options.stop)
    }
}

impl Solver for Simultaneous {
    fn name(&self) -> &'static str {
        "simultaneous"
    }

    fn description(&self) -> &'static str {
        "iterate a convex combination of projections (uniform weights by default)"
    }

    fn solve(&self, problem: &Problem, options: &SolveOptions) -> Result<Trace> {
        let m = problem.sets.len();
        let weights = problem.weights.clone().unwrap_or_else(|| vec![1.0 / m.max(1) as f64; m]);
        engines::simultaneous_projections(&problem.sets, &weights, &problem.x0, &options.stop)
    }
}

impl Solver for Sequential {
    fn name(&self) -> &'static str {
        "sequential"
    }

    fn description(&self) -> &'static str {
        "iterate full sweeps of projections in input order"
    }

    fn solve(&self, problem: &Problem, options: &SolveOptions) -> Result<Trace> {
        engines::sequential_projections(&problem.sets, &problem.x0, &options.stop)
    }
}

impl Solver for InnerApprox {
    fn name(&self) -> &'static str {
        "inner-approx"
    }

    fn description(&self) -> &'static str {
        "separating-hyperplane projections onto shrinking inner approximations"
    }

    fn solve(&self, problem: &Problem, options: &SolveOptions) -> Result<Trace> {
        engines::inner_approx_separating(
            &problem.oracles,
            &problem.x0,
            &options.schedule,
            options.control,
            &options.stop,
        )
    }
}

/// Solvers keyed by name.
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn Solver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl SolverRegistry {
    pub fn empty() -> Self {
        SolverRegistry { solvers: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(FixedPoint));
        reg.register(Box::new(Simultaneous));
        reg.register(Box::new(Sequential));
        reg.register(Box::new(InnerApprox));
        reg
    }

    pub fn register(&mut self, solver: Box<dyn Solver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Solver> {
        self.solvers
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownName { kind: "solver", name: name.to_string() })
    }

    pub fn solve(&self, name: &str, problem: &Problem, options: &SolveOptions) -> Result<Trace> {
        self.get(name)?.solve(problem, options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::TerminationStatus;

    #[test]
    fn registry_dispatches_by_name() {
        let reg = SolverRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["fixed-point", "inner-approx", "sequential", "simultaneous"]);
        let problem = Problem::from_json(
            r#"{"x0": [3, 3], "oracles": [
                {"family": "ball", "center": [-0.5, 0], "radius": 1},
                {"family": "ball", "center": [0.5, 0], "radius": 1}]}"#,
            &OracleRegistry::with_builtins(),
        )
        .unwrap();
        let t = reg.solve("inner-approx", &problem, &SolveOptions::default()).unwrap();
        assert_eq!(t.status, TerminationStatus::FinitelyConvergent);
        assert!(matches!(reg.get("newton"), Err(Error::UnknownName { .. })));
        assert!(reg.solve("fixed-point", &problem, &SolveOptions::default()).is_err());
    }

    #[test]
    fn simultaneous_defaults_to_uniform_weights() {
        let problem = Problem::from_json(
            r#"{"x0": [2, 2], "sets": [
                {"variant": "halfspace", "normal": [1, 0], "offset": 0},
                {"variant": "halfspace", "normal": [0, 1], "offset": 0}]}"#,
            &OracleRegistry::with_builtins(),
        )
        .unwrap();
        let t = SolverRegistry::with_builtins().solve("simultaneous", &problem, &SolveOptions::default()).unwrap();
        assert_eq!(t.iterates[1].as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn problem_parse_errors() {
        let reg = OracleRegistry::with_builtins();
        assert!(Problem::from_json(r#"{"x0": []}"#, &reg).is_err());
        assert!(Problem::from_json(r#"{"x0": [1], "oracles": [{"family": "spline"}]}"#, &reg).is_err());
        assert!(Problem::from_json(r#"{"x0": [1], "extra": 1}"#, &reg).is_err());
    }
}
