//! Operators `T: ℝⁿ → ℝⁿ` built from projections and affine maps, closed under
//! convex combination and composition.

mod property;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexSetSpec, Vector};

pub use property::{check_property, PropertyKind, PropertyReport, Violation};

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedOperator {
    pub weight: f64,
    pub op: OperatorSpec,
}

/// Declarative operator. `Composition` applies its list left to right, so
/// `[P1, P2]` is `P2 ∘ P1`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum OperatorSpec {
    Projection { set: ConvexSetSpec },
    Affine { matrix: Vec<Vec<f64>>, shift: Vector },
    ConvexCombination { terms: Vec<WeightedOperator> },
    Composition { ops: Vec<OperatorSpec> },
}

#[derive(Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
enum OperatorRepr {
    Projection { set: ConvexSetSpec },
    Affine { matrix: Vec<Vec<f64>>, shift: Vector },
    ConvexCombination { terms: Vec<WeightedOperator> },
    Composition { ops: Vec<OperatorSpec> },
}

impl<'de> Deserialize<'de> for OperatorSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let op = match OperatorRepr::deserialize(deserializer)? {
            OperatorRepr::Projection { set } => OperatorSpec::Projection { set },
            OperatorRepr::Affine { matrix, shift } => OperatorSpec::Affine { matrix, shift },
            OperatorRepr::ConvexCombination { terms } => OperatorSpec::ConvexCombination { terms },
            OperatorRepr::Composition { ops } => OperatorSpec::Composition { ops },
        };
        op.validate().map_err(serde::de::Error::custom)?;
        Ok(op)
    }
}

impl OperatorSpec {
    pub fn projection(set: ConvexSetSpec) -> Self {
        OperatorSpec::Projection { set }
    }

    pub fn affine(matrix: Vec<Vec<f64>>, shift: Vector) -> Result<Self> {
        let op = OperatorSpec::Affine { matrix, shift };
        op.validate()?;
        Ok(op)
    }

    /// `c · I`, with zero shift.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let matrix = (0..dim).map(|i| (0..dim).map(|j| if i == j { c } else { 0.0 }).collect()).collect();
        OperatorSpec::Affine { matrix, shift: Vector::zeros(dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    /// Counter-clockwise rotation of the plane by `angle` radians.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        OperatorSpec::Affine { matrix: vec![vec![c, -s], vec![s, c]], shift: Vector::zeros(2) }
    }

    pub fn convex_combination(terms: Vec<(f64, OperatorSpec)>) -> Result<Self> {
        let op = OperatorSpec::ConvexCombination {
            terms: terms.into_iter().map(|(weight, op)| WeightedOperator { weight, op }).collect(),
        };
        op.validate()?;
        Ok(op)
    }

    pub fn composition(ops: Vec<OperatorSpec>) -> Result<Self> {
        let op = OperatorSpec::Composition { ops };
        op.validate()?;
        Ok(op)
    }

    /// Ambient dimension, if any member fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            OperatorSpec::Projection { set } => set.dim(),
            OperatorSpec::Affine { shift, .. } => Some(shift.dim()),
            OperatorSpec::ConvexCombination { terms } => terms.iter().find_map(|t| t.op.dim()),
            OperatorSpec::Composition { ops } => ops.iter().find_map(OperatorSpec::dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let members: Vec<&OperatorSpec> = match self {
            OperatorSpec::Projection { set } => return set.validate(),
            OperatorSpec::Affine { matrix, shift } => {
                let n = shift.dim();
                if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidOperator(format!("affine matrix must be {n}x{n}")));
                }
                if matrix.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidOperator("affine matrix entries must be finite".into()));
                }
                return Ok(());
            }
            OperatorSpec::ConvexCombination { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidOperator("convex combination needs at least one term".into()));
                }
                if terms.iter().any(|t| !(0.0..=1.0).contains(&t.weight)) {
                    return Err(Error::InvalidOperator("weights must lie in [0, 1]".into()));
                }
                let total: f64 = terms.iter().map(|t| t.weight).sum();
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidOperator(format!("weights sum to {total}, not 1")));
                }
                terms.iter().map(|t| &t.op).collect()
            }
            OperatorSpec::Composition { ops } => {
                if ops.is_empty() {
                    return Err(Error::InvalidOperator("composition needs at least one operator".into()));
                }
                ops.iter().collect()
            }
        };
        let mut dim = None;
        for m in members {
            m.validate()?;
            match (dim, m.dim()) {
                (None, d) => dim = d,
                (Some(a), Some(b)) if a != b => return Err(Error::DimensionMismatch { expected: a, found: b }),
                _ => {}
            }
        }
        Ok(())
    }

    /// `T(x)`.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if let Some(d) = self.dim() {
            x.ensure_dim(d)?;
        }
        match self {
            OperatorSpec::Projection { set } => set.project(x),
            OperatorSpec::Affine { matrix, shift } => Ok(Vector::from_raw(
                matrix
                    .iter()
                    .zip(shift.as_slice())
                    .map(|(row, s)| row.iter().zip(x.as_slice()).map(|(a, v)| a * v).sum::<f64>() + s)
                    .collect(),
            )),
            OperatorSpec::ConvexCombination { terms } => {
                let mut acc = vec![0.0; x.dim()];
                for t in terms {
                    let y = t.op.apply(x)?;
                    for (a, v) in acc.iter_mut().zip(y.as_slice()) {
                        *a += t.weight * v;
                    }
                }
                Ok(Vector::from_raw(acc))
            }
            OperatorSpec::Composition { ops } => {
                let mut y = x.clone();
                for op in ops {
                    y = op.apply(&y)?;
                }
                Ok(y)
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn apply(op: &OperatorSpec, x: &Vector) -> Result<Vector> {
    op.apply(x)
}

/// `‖T(x) − x‖`.
pub fn fixed_point_residual(op: &OperatorSpec, x: &Vector) -> Result<f64> {
    Ok(op.apply(x)?.distance(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn lower_half(axis: usize) -> OperatorSpec {
        let mut n = vec![0.0, 0.0];
        n[axis] = 1.0;
        OperatorSpec::projection(ConvexSetSpec::halfspace(Vector::new(n).unwrap(), 0.0).unwrap())
    }

    #[test]
    fn apply_examples() {
        let half = OperatorSpec::scaled_identity(2, 0.5);
        assert_eq!(half.apply(&vector![2.0, 4.0]).unwrap(), vector![1.0, 2.0]);

        let avg = OperatorSpec::convex_combination(vec![(0.5, lower_half(0)), (0.5, lower_half(1))]).unwrap();
        assert_eq!(avg.apply(&vector![2.0, 2.0]).unwrap(), vector![1.0, 1.0]);

        let seq = OperatorSpec::composition(vec![lower_half(0), lower_half(1)]).unwrap();
        assert_eq!(seq.apply(&vector![1.0, 1.0]).unwrap(), vector![0.0, 0.0]);
    }

    #[test]
    fn composition_order_is_left_to_right() {
        // P_ball then shift-by-(5,0): order matters.
        let shift = OperatorSpec::affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vector![5.0, 0.0]).unwrap();
        let ball = OperatorSpec::projection(ConvexSetSpec::ball(vector![0.0, 0.0], 1.0).unwrap());
        let op = OperatorSpec::composition(vec![ball.clone(), shift.clone()]).unwrap();
        assert_eq!(op.apply(&vector![0.0, 0.0]).unwrap(), vector![5.0, 0.0]);
        let op = OperatorSpec::composition(vec![shift, ball]).unwrap();
        assert_eq!(op.apply(&vector![0.0, 0.0]).unwrap(), vector![1.0, 0.0]);
    }

    #[test]
    fn residual_examples() {
        let p = lower_half(0);
        assert_eq!(fixed_point_residual(&p, &vector![-1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(fixed_point_residual(&p, &vector![3.0, 0.0]).unwrap(), 3.0);
        let two_balls = OperatorSpec::composition(vec![
            OperatorSpec::projection(ConvexSetSpec::ball(vector![-0.5, 0.0], 1.0).unwrap()),
            OperatorSpec::projection(ConvexSetSpec::ball(vector![0.5, 0.0], 1.0).unwrap()),
        ])
        .unwrap();
        assert_eq!(fixed_point_residual(&two_balls, &vector![0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(fixed_point_residual(&p, &vector![1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn validation() {
        assert!(OperatorSpec::convex_combination(vec![(0.5, lower_half(0)), (0.4, lower_half(1))]).is_err());
        assert!(OperatorSpec::convex_combination(vec![(1.5, lower_half(0)), (-0.5, lower_half(1))]).is_err());
        assert!(OperatorSpec::affine(vec![vec![1.0]], vector![0.0, 0.0]).is_err());
        let three_d = OperatorSpec::identity(3);
        assert!(matches!(
            OperatorSpec::composition(vec![lower_half(0), three_d]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let op = OperatorSpec::convex_combination(vec![
            (0.25, lower_half(0)),
            (0.75, OperatorSpec::composition(vec![lower_half(1), OperatorSpec::rotation(0.3)]).unwrap()),
        ])
        .unwrap();
        let s = op.to_json().unwrap();
        let back = OperatorSpec::from_json(&s).unwrap();
        assert_eq!(back.to_json().unwrap(), s);
        let x = vector![0.7, -1.3];
        assert_eq!(op.apply(&x).unwrap(), back.apply(&x).unwrap());
        assert!(OperatorSpec::from_json(
            r#"{"variant":"convex_combination","terms":[{"weight":0.5,"op":{"variant":"affine","matrix":[[1]],"shift":[0]}}]}"#
        )
        .is_err());
    }
}
