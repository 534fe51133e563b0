//! Reproducible example traces with their anchor sets and known targets.

mod arc;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use arc::{arc_iterates, beta_sq_closed_form, beta_sq_recursion, return_height};

use crate::diagnostics::AnchorSet;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::sampling;
use crate::solvers::Trace;

/// Margin kept from boundary pieces the sampled set excludes.
pub const OPEN_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactValue {
    Flag(bool),
    Scalar(f64),
    Vector(Vector),
}

/// A known value together with where it comes from: `analytic` (closed form),
/// `recursion` (hand-evaluated recursion) or `observed` (expected diagnostics outcome).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub value: FactValue,
    pub provenance: String,
}

impl Fact {
    fn new(value: FactValue, provenance: &str) -> Self {
        Fact { value, provenance: provenance.to_string() }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self.value {
            FactValue::Scalar(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&Vector> {
        match &self.value {
            FactValue::Vector(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleFixture {
    pub name: String,
    pub trace: Trace,
    pub anchor_sets: BTreeMap<String, AnchorSet>,
    pub analytic_facts: BTreeMap<String, Fact>,
}

impl ExampleFixture {
    pub fn anchor_set(&self, name: &str) -> Result<&AnchorSet> {
        self.anchor_sets
            .get(name)
            .ok_or_else(|| Error::UnknownName { kind: "anchor set", name: name.to_string() })
    }

    pub fn fact(&self, name: &str) -> Result<&Fact> {
        self.analytic_facts
            .get(name)
            .ok_or_else(|| Error::UnknownName { kind: "fact", name: name.to_string() })
    }

    /// The trace with anchor sets and facts stored in its `params`.
    pub fn export_trace(&self) -> Result<Trace> {
        let mut t = self.trace.clone();
        t.params.insert("fixture".into(), Value::String(self.name.clone()));
        t.params.insert("anchor_sets".into(), serde_json::to_value(&self.anchor_sets)?);
        t.params.insert("analytic_facts".into(), serde_json::to_value(&self.analytic_facts)?);
        Ok(t)
    }
}

/// Reads the anchor set `name` embedded in an exported trace.
pub fn embedded_anchor_set(trace: &Trace, name: &str) -> Result<AnchorSet> {
    let sets = trace
        .params
        .get("anchor_sets")
        .ok_or_else(|| Error::UnknownName { kind: "anchor set", name: name.to_string() })?;
    let doc = sets
        .get(name)
        .ok_or_else(|| Error::UnknownName { kind: "anchor set", name: name.to_string() })?;
    Ok(serde_json::from_value(doc.clone())?)
}

fn point(x: f64, y: f64) -> Vector {
    Vector::from_raw(vec![x, y])
}

fn arc_trace(algorithm: &str, num_iterates: usize) -> Trace {
    Trace {
        iterates: arc_iterates(num_iterates),
        ..Trace::new(algorithm, point(0.0, 2.0))
    }
    .with_param("num_iterates", num_iterates)
}

fn common_facts() -> BTreeMap<String, Fact> {
    let mut f = BTreeMap::new();
    f.insert("limit".into(), Fact::new(FactValue::Vector(point(0.0, (4.0f64 / 3.0).sqrt())), "analytic"));
    f.insert("limit_beta_sq".into(), Fact::new(FactValue::Scalar(4.0 / 3.0), "analytic"));
    let first = [
        (0.0, 2.0),
        (1.0, 2.0),
        (0.0, 3f64.sqrt()),
        (0.5, 3f64.sqrt()),
        (0.0, 1.5),
        (0.25, 1.5),
        (0.0, 1.8125f64.sqrt()),
    ];
    for (k, (x, y)) in first.into_iter().enumerate() {
        f.insert(format!("x{k}"), Fact::new(FactValue::Vector(point(x, y)), "recursion"));
    }
    for (l, v) in [(0, 4.0), (1, 3.0), (2, 2.25), (3, 1.8125)] {
        f.insert(format!("beta_sq_{}", 2 * l), Fact::new(FactValue::Scalar(v), "recursion"));
    }
    f
}

fn origin_set() -> AnchorSet {
    AnchorSet::singleton("origin", point(0.0, 0.0))
}

/// The arc sequence with anchors `w^ℓ = (2^{-ℓ}, 0)`, random points `(λ, 0)`
/// with `λ ∈ [1e-3, 1]`, and the origin.
pub fn arc_example(num_iterates: usize, num_anchor_points: usize) -> Result<ExampleFixture> {
    arc_example_seeded(num_iterates, num_anchor_points, 0)
}

pub fn arc_example_seeded(num_iterates: usize, num_anchor_points: usize, seed: u64) -> Result<ExampleFixture> {
    if num_iterates == 0 || num_anchor_points == 0 {
        return Err(Error::InvalidParameter("need at least one iterate and one anchor point".into()));
    }
    let m = num_anchor_points;
    let mut anchor_sets = BTreeMap::new();
    let w = (0..m).map(|l| point(0.5f64.powi(l as i32), 0.0)).collect();
    anchor_sets.insert("M_sample".to_string(), AnchorSet::new("M_sample", w)?);
    let mut rng = sampling::rng(seed);
    let hull = (0..m).map(|_| point(rng.gen_range(1e-3..=1.0), 0.0)).collect();
    anchor_sets.insert("convM_sample".to_string(), AnchorSet::new("convM_sample", hull)?);
    anchor_sets.insert("origin".to_string(), origin_set());
    let mut analytic_facts = common_facts();
    for l in 0..m.min(8) {
        analytic_facts
            .insert(format!("fejer_star_bound_w{l}"), Fact::new(FactValue::Scalar(2.0 * l as f64), "analytic"));
    }
    analytic_facts.insert("origin_fejer_star_present".into(), Fact::new(FactValue::Flag(false), "analytic"));
    Ok(ExampleFixture {
        name: "arc".into(),
        trace: arc_trace("arc", num_iterates).with_param("seed", seed),
        anchor_sets,
        analytic_facts,
    })
}

/// The arc sequence with a grid sample of `(0, 1] × (−1, 0]`, a set with
/// nonempty interior, kept [`OPEN_MARGIN`] away from the excluded edges.
pub fn arc_interior_example(num_iterates: usize, grid: usize) -> Result<ExampleFixture> {
    if num_iterates == 0 || grid < 2 {
        return Err(Error::InvalidParameter("need at least one iterate and a grid of at least 2".into()));
    }
    let step = |i: usize| (1.0 - OPEN_MARGIN) * i as f64 / (grid - 1) as f64;
    let mut pts = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            pts.push(point(OPEN_MARGIN + step(i), -step(j)));
        }
    }
    let mut anchor_sets = BTreeMap::new();
    anchor_sets.insert("M_sample".to_string(), AnchorSet::new("M_sample", pts)?);
    anchor_sets.insert("origin".to_string(), origin_set());
    let mut analytic_facts = common_facts();
    analytic_facts.insert("M_sample_fejer_star_present".into(), Fact::new(FactValue::Flag(true), "observed"));
    analytic_facts.insert("origin_fejer_star_present".into(), Fact::new(FactValue::Flag(false), "analytic"));
    Ok(ExampleFixture {
        name: "arc-interior".into(),
        trace: arc_trace("arc", num_iterates).with_param("grid", grid),
        anchor_sets,
        analytic_facts,
    })
}

/// The arc sequence with 11 evenly spaced anchors on `[−1, 0] × {0}`: the
/// trace is quasi-Fejér of Type II there without being Fejér* monotone.
pub fn arc_segment_example(num_iterates: usize) -> Result<ExampleFixture> {
    if num_iterates < 4 {
        return Err(Error::InvalidParameter("need at least 4 iterates".into()));
    }
    let pts = (0..=10).map(|i| point(i as f64 / 10.0 - 1.0, 0.0)).collect();
    let mut anchor_sets = BTreeMap::new();
    anchor_sets.insert("M_sample".to_string(), AnchorSet::new("M_sample", pts)?);
    anchor_sets.insert("origin".to_string(), origin_set());
    let mut analytic_facts = common_facts();
    analytic_facts.insert("type2_consistent_with_summable".into(), Fact::new(FactValue::Flag(true), "analytic"));
    analytic_facts.insert("origin_fejer_star_present".into(), Fact::new(FactValue::Flag(false), "analytic"));
    // Σ_ℓ (4^{-ℓ} + 2·2^{-ℓ}): the worst anchor is (−1, 0).
    analytic_facts.insert("type2_sum_limit".into(), Fact::new(FactValue::Scalar(4.0 / 3.0 + 4.0), "analytic"));
    Ok(ExampleFixture { name: "arc-segment".into(), trace: arc_trace("arc", num_iterates), anchor_sets, analytic_facts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureParams {
    pub iters: usize,
    pub anchors: usize,
    pub seed: u64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { iters: 200, anchors: 6, seed: 0 }
    }
}

/// A named fixture generator.
pub trait Fixture: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn build(&self, params: &FixtureParams) -> Result<ExampleFixture>;
}

struct ArcFixture;
struct ArcInterior;
struct ArcSegment;

impl Fixture for ArcFixture {
    fn name(&self) -> &'static str {
        "arc"
    }

    fn description(&self) -> &'static str {
        "Fejér* but not Fejér monotone; anchors w^l, random (λ,0) and the origin"
    }

    fn build(&self, p: &FixtureParams) -> Result<ExampleFixture> {
        arc_example_seeded(p.iters, p.anchors, p.seed)
    }
}

impl Fixture for ArcInterior {
    fn name(&self) -> &'static str {
        "arc-interior"
    }

    fn description(&self) -> &'static str {
        "arc sequence against a grid of the box (0,1] x (-1,0]"
    }

    fn build(&self, p: &FixtureParams) -> Result<ExampleFixture> {
        arc_interior_example(p.iters, p.anchors.max(2))
    }
}

impl Fixture for ArcSegment {
    fn name(&self) -> &'static str {
        "arc-segment"
    }

    fn description(&self) -> &'static str {
        "arc sequence against [-1,0] x {0}: quasi-Fejér Type II, not Fejér*"
    }

    fn build(&self, p: &FixtureParams) -> Result<ExampleFixture> {
        arc_segment_example(p.iters)
    }
}

pub struct FixtureRegistry {
    fixtures: BTreeMap<&'static str, Box<dyn Fixture>>,
}

impl Default for FixtureRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl FixtureRegistry {
    pub fn with_builtins() -> Self {
        let mut reg = FixtureRegistry { fixtures: BTreeMap::new() };
        reg.register(Box::new(ArcFixture));
        reg.register(Box::new(ArcInterior));
        reg.register(Box::new(ArcSegment));
        reg
    }

    pub fn register(&mut self, fixture: Box<dyn Fixture>) {
        self.fixtures.insert(fixture.name(), fixture);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.fixtures.keys().copied().collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.fixtures.values().map(|f| (f.name(), f.description())).collect()
    }

    pub fn build(&self, name: &str, params: &FixtureParams) -> Result<ExampleFixture> {
        self.fixtures
            .get(name)
            .ok_or_else(|| Error::UnknownName { kind: "fixture", name: name.to_string() })?
            .build(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_iterates() {
        let f = arc_example(7, 3).unwrap();
        for k in 0..7 {
            let want = f.fact(&format!("x{k}")).unwrap().as_vector().unwrap();
            assert!(f.trace.iterates[k].max_abs_diff(want) <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn structural_invariants() {
        let t = arc_iterates(201);
        for (k, x) in t.iter().enumerate() {
            if k % 2 == 0 {
                assert_eq!(x[0], 0.0);
            } else {
                assert_eq!(x[0], 0.5f64.powi((k / 2) as i32));
            }
            assert!(x[1] >= 1.0);
            assert!(x.distance(&point(1.0, 0.0)) >= 1.0);
        }
        assert!(t.windows(2).all(|w| w[1][1] <= w[0][1]));
    }

    #[test]
    fn interior_grid_is_half_open() {
        let f = arc_interior_example(10, 5).unwrap();
        let m = f.anchor_set("M_sample").unwrap();
        assert!(m.points.contains(&point(1.0, 0.0)));
        assert!(!m.points.contains(&point(0.0, 0.0)));
        assert!(m.iter().all(|p| p[0] > 0.0 && p[0] <= 1.0 && p[1] > -1.0 && p[1] <= 0.0));
        assert_eq!(f.anchor_set("origin").unwrap().points, vec![point(0.0, 0.0)]);
    }

    #[test]
    fn registry_and_export() {
        let reg = FixtureRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["arc", "arc-interior", "arc-segment"]);
        let f = reg.build("arc-segment", &FixtureParams::default()).unwrap();
        assert_eq!(f.anchor_set("M_sample").unwrap().len(), 11);
        let t = f.export_trace().unwrap();
        let back = Trace::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(embedded_anchor_set(&back, "M_sample").unwrap(), *f.anchor_set("M_sample").unwrap());
        assert!(reg.build("spiral", &FixtureParams::default()).is_err());
        assert!(arc_segment_example(3).is_err());
    }
}
