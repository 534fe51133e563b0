use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use super::Vector;
use crate::error::{Error, Result};

type ValueFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
type SubgradientFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

/// A convex function `g` given by value and subgradient callables.
///
/// Convexity is a contract on the caller; [`ConvexFnOracle::verify`] can
/// falsify it on a finite sample but never prove it.
#[derive(Clone)]
pub struct ConvexFnOracle {
    label: String,
    dim: Option<usize>,
    value: ValueFn,
    subgradient: SubgradientFn,
}

impl fmt::Debug for ConvexFnOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFnOracle").field("label", &self.label).field("dim", &self.dim).finish()
    }
}

/// Outcome of a sampled convexity / subgradient check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub convexity_violations: usize,
    pub subgradient_violations: usize,
    pub worst_convexity_gap: f64,
    pub worst_subgradient_gap: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.convexity_violations == 0 && self.subgradient_violations == 0
    }
}

impl ConvexFnOracle {
    pub fn new<V, S>(label: impl Into<String>, dim: Option<usize>, value: V, subgradient: S) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        S: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        ConvexFnOracle { label: label.into(), dim, value: Arc::new(value), subgradient: Arc::new(subgradient) }
    }

    /// `g(y) = ‖y − center‖² − radius²`, whose zero sublevel set is a closed ball.
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        let dim = center.dim();
        let c1 = center.clone();
        let r2 = radius * radius;
        Ok(ConvexFnOracle::new(
            format!("ball(center={center}, radius={radius})"),
            Some(dim),
            move |y| (y - &c1).norm_sq() - r2,
            move |y| (y - &center).scale(2.0),
        ))
    }

    /// `g(y) = ⟨normal, y⟩ − offset`.
    pub fn affine(normal: Vector, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::InvalidParameter("affine offset must be finite".into()));
        }
        let dim = normal.dim();
        let n1 = normal.clone();
        let label = format!("affine(normal={normal}, offset={offset})");
        Ok(ConvexFnOracle::new(label, Some(dim), move |y| n1.dot(y) - offset, move |_| normal.clone()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Ambient dimension, when the oracle declares one.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn check_dim(&self, x: &Vector) -> Result<()> {
        match self.dim {
            Some(d) => x.ensure_dim(d),
            None => Ok(()),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    pub fn subgradient(&self, x: &Vector) -> Vector {
        (self.subgradient)(x)
    }

    /// The oracle of `g(·) + shift`.
    pub fn shifted(&self, shift: f64) -> ConvexFnOracle {
        let value = self.value.clone();
        ConvexFnOracle {
            label: format!("{} + {shift}", self.label),
            dim: self.dim,
            value: Arc::new(move |x| value(x) + shift),
            subgradient: self.subgradient.clone(),
        }
    }

    /// Falsification check of convexity (midpoint-style at the given `ts`) and of
    /// the subgradient inequality over all ordered pairs of `points`.
    pub fn verify(&self, points: &[Vector], ts: &[f64], tol: f64) -> OracleCheck {
        let mut check = OracleCheck {
            convexity_violations: 0,
            subgradient_violations: 0,
            worst_convexity_gap: 0.0,
            worst_subgradient_gap: 0.0,
        };
        let values: Vec<f64> = points.iter().map(|p| self.value(p)).collect();
        let subgrads: Vec<Vector> = points.iter().map(|p| self.subgradient(p)).collect();
        for (i, x) in points.iter().enumerate() {
            for (j, y) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                for &t in ts {
                    let z = x.lerp(y, t);
                    let gap = self.value(&z) - (t * values[i] + (1.0 - t) * values[j]);
                    check.worst_convexity_gap = check.worst_convexity_gap.max(gap);
                    if gap > tol {
                        check.convexity_violations += 1;
                    }
                }
                let gap = values[i] + subgrads[i].dot(&(y - x)) - values[j];
                check.worst_subgradient_gap = check.worst_subgradient_gap.max(gap);
                if gap > tol {
                    check.subgradient_violations += 1;
                }
            }
        }
        check
    }
}

/// A named family of built-in oracles, instantiated from JSON parameters.
pub trait OracleFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, params: &Value) -> Result<ConvexFnOracle>;
}

struct BallFamily;
struct AffineFamily;

#[derive(Deserialize)]
struct BallParams {
    center: Vector,
    radius: f64,
}

#[derive(Deserialize)]
struct AffineParams {
    normal: Vector,
    offset: f64,
}

impl OracleFamily for BallFamily {
    fn name(&self) -> &'static str {
        "ball"
    }

    fn build(&self, params: &Value) -> Result<ConvexFnOracle> {
        let p: BallParams = serde_json::from_value(params.clone())?;
        ConvexFnOracle::ball(p.center, p.radius)
    }
}

impl OracleFamily for AffineFamily {
    fn name(&self) -> &'static str {
        "affine"
    }

    fn build(&self, params: &Value) -> Result<ConvexFnOracle> {
        let p: AffineParams = serde_json::from_value(params.clone())?;
        ConvexFnOracle::affine(p.normal, p.offset)
    }
}

/// Registry of oracle families keyed by name.
pub struct OracleRegistry {
    families: BTreeMap<&'static str, Box<dyn OracleFamily>>,
}

impl Default for OracleRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl OracleRegistry {
    pub fn empty() -> Self {
        OracleRegistry { families: BTreeMap::new() }
    }

    /// `ball` and `affine`.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(BallFamily));
        reg.register(Box::new(AffineFamily));
        reg
    }

    pub fn register(&mut self, family: Box<dyn OracleFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.keys().copied().collect()
    }

    /// Builds an oracle from a document `{"family": <name>, ...params}`.
    pub fn build(&self, doc: &Value) -> Result<ConvexFnOracle> {
        let name = doc
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Format("oracle document needs a string `family` field".into()))?;
        let family = self
            .families
            .get(name)
            .ok_or_else(|| Error::UnknownName { kind: "oracle family", name: name.to_string() })?;
        family.build(doc)
    }
}
