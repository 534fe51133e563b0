use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ConvexFnOracle, Vector};
use crate::error::{Error, Result};

/// A closed convex set of ℝⁿ.
///
/// `Halfspace` is `{y | ⟨normal, y⟩ ≤ offset}` and `Hyperplane` is
/// `{y | ⟨normal, y⟩ = offset}`. Use the checked constructors; the variants
/// are public for matching.
#[derive(Debug, Clone)]
pub enum ConvexSetSpec {
    Halfspace { normal: Vector, offset: f64 },
    Hyperplane { normal: Vector, offset: f64 },
    Ball { center: Vector, radius: f64 },
    Box { lower: Vector, upper: Vector },
    Sublevel(ConvexFnOracle),
    Intersection(Vec<ConvexSetSpec>),
}

impl ConvexSetSpec {
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        let s = ConvexSetSpec::Halfspace { normal, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        let s = ConvexSetSpec::Hyperplane { normal, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let s = ConvexSetSpec::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        let s = ConvexSetSpec::Box { lower, upper };
        s.validate()?;
        Ok(s)
    }

    pub fn sublevel(g: ConvexFnOracle) -> Self {
        ConvexSetSpec::Sublevel(g)
    }

    pub fn intersection(members: Vec<ConvexSetSpec>) -> Result<Self> {
        let s = ConvexSetSpec::Intersection(members);
        s.validate()?;
        Ok(s)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexSetSpec::Halfspace { .. } => "halfspace",
            ConvexSetSpec::Hyperplane { .. } => "hyperplane",
            ConvexSetSpec::Ball { .. } => "ball",
            ConvexSetSpec::Box { .. } => "box",
            ConvexSetSpec::Sublevel(_) => "sublevel",
            ConvexSetSpec::Intersection(_) => "intersection",
        }
    }

    /// Ambient dimension; `None` for oracles that do not declare one and for an
    /// empty intersection.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexSetSpec::Halfspace { normal, .. } | ConvexSetSpec::Hyperplane { normal, .. } => Some(normal.dim()),
            ConvexSetSpec::Ball { center, .. } => Some(center.dim()),
            ConvexSetSpec::Box { lower, .. } => Some(lower.dim()),
            ConvexSetSpec::Sublevel(g) => g.dim(),
            ConvexSetSpec::Intersection(ms) => ms.iter().find_map(ConvexSetSpec::dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSetSpec::Halfspace { normal, offset } | ConvexSetSpec::Hyperplane { normal, offset } => {
                if !(normal.norm() > 0.0) {
                    return Err(Error::InvalidSet("normal must have positive norm".into()));
                }
                if !offset.is_finite() {
                    return Err(Error::InvalidSet("offset must be finite".into()));
                }
            }
            ConvexSetSpec::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSet(format!("radius must be positive, got {radius}")));
                }
            }
            ConvexSetSpec::Box { lower, upper } => {
                lower.ensure_dim(upper.dim())?;
                if lower.as_slice().iter().zip(upper.as_slice()).any(|(l, u)| l > u) {
                    return Err(Error::InvalidSet("box requires lower <= upper componentwise".into()));
                }
            }
            ConvexSetSpec::Sublevel(_) => {}
            ConvexSetSpec::Intersection(ms) => {
                let mut dim = None;
                for m in ms {
                    m.validate()?;
                    match (dim, m.dim()) {
                        (None, d) => dim = d,
                        (Some(a), Some(b)) if a != b => {
                            return Err(Error::DimensionMismatch { expected: a, found: b })
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        match self.dim() {
            Some(d) => x.ensure_dim(d),
            None => Ok(()),
        }
    }

    /// Whether `x` satisfies the defining inequalities up to `tol`.
    ///
    /// Halfspace and hyperplane tolerances apply to the signed distance, so
    /// rescaling the normal does not change the answer.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
        }
        self.check_dim(x)?;
        Ok(match self {
            ConvexSetSpec::Halfspace { normal, offset } => (normal.dot(x) - offset) / normal.norm() <= tol,
            ConvexSetSpec::Hyperplane { normal, offset } => ((normal.dot(x) - offset) / normal.norm()).abs() <= tol,
            ConvexSetSpec::Ball { center, radius } => x.distance(center) <= radius + tol,
            ConvexSetSpec::Box { lower, upper } => x
                .as_slice()
                .iter()
                .zip(lower.as_slice().iter().zip(upper.as_slice()))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            ConvexSetSpec::Sublevel(g) => g.value(x) <= tol,
            ConvexSetSpec::Intersection(ms) => {
                for m in ms {
                    if !m.contains(x, tol)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Euclidean projection for the four closed-form variants.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        match self {
            ConvexSetSpec::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    Ok(x.clone())
                } else {
                    Ok(x.axpy(-excess / normal.norm_sq(), normal))
                }
            }
            ConvexSetSpec::Hyperplane { normal, offset } => {
                let excess = normal.dot(x) - offset;
                Ok(x.axpy(-excess / normal.norm_sq(), normal))
            }
            ConvexSetSpec::Ball { center, radius } => {
                let d = x - center;
                let dist = d.norm();
                if dist <= *radius {
                    Ok(x.clone())
                } else {
                    Ok(center.axpy(radius / dist, &d))
                }
            }
            ConvexSetSpec::Box { lower, upper } => Ok(Vector::from_raw(
                x.as_slice()
                    .iter()
                    .zip(lower.as_slice().iter().zip(upper.as_slice()))
                    .map(|(v, (l, u))| v.clamp(*l, *u))
                    .collect(),
            )),
            ConvexSetSpec::Sublevel(_) | ConvexSetSpec::Intersection(_) => Err(Error::UnsupportedSet(self.kind())),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SetRepr::try_from(self)?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: SetRepr = serde_json::from_str(s)?;
        ConvexSetSpec::try_from(repr)
    }
}

/// Default tolerance `1e-9 · (1 + ‖x‖)` for membership and projection checks.
pub fn default_tol(x: &Vector) -> f64 {
    scaled_tol(crate::DEFAULT_REL_TOL, x)
}

pub fn scaled_tol(rel: f64, x: &Vector) -> f64 {
    rel * (1.0 + x.norm())
}

/// The halfspace `{y | g(x) + ε + ⟨u, y − x⟩ ≤ 0}` with `u ∈ ∂g(x)`, which
/// contains `{g + ε ≤ 0}` and excludes `x`.
pub fn separating_halfspace(g: &ConvexFnOracle, x: &Vector, epsilon: f64) -> Result<ConvexSetSpec> {
    g.check_dim(x)?;
    let level = g.value(x) + epsilon;
    if !(level > 0.0) {
        return Err(Error::NotViolating(level));
    }
    let u = g.subgradient(x);
    x.ensure_dim(u.dim())?;
    if !(u.norm() > 0.0) {
        return Err(Error::ZeroSubgradient);
    }
    let offset = u.dot(x) - level;
    Ok(ConvexSetSpec::Halfspace { normal: u, offset })
}

/// `{y | g(y) + ε ≤ 0}`; the family is nested (decreasing in ε).
pub fn inner_approximation(g: &ConvexFnOracle, epsilon: f64) -> Result<ConvexSetSpec> {
    if !(epsilon >= 0.0) {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    Ok(ConvexSetSpec::Sublevel(g.shifted(epsilon)))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
enum SetRepr {
    Halfspace { normal: Vector, offset: f64 },
    Hyperplane { normal: Vector, offset: f64 },
    Ball { center: Vector, radius: f64 },
    Box { lower: Vector, upper: Vector },
    Intersection { members: Vec<SetRepr> },
}

impl TryFrom<&ConvexSetSpec> for SetRepr {
    type Error = Error;

    fn try_from(s: &ConvexSetSpec) -> Result<Self> {
        Ok(match s {
            ConvexSetSpec::Halfspace { normal, offset } => SetRepr::Halfspace { normal: normal.clone(), offset: *offset },
            ConvexSetSpec::Hyperplane { normal, offset } => {
                SetRepr::Hyperplane { normal: normal.clone(), offset: *offset }
            }
            ConvexSetSpec::Ball { center, radius } => SetRepr::Ball { center: center.clone(), radius: *radius },
            ConvexSetSpec::Box { lower, upper } => SetRepr::Box { lower: lower.clone(), upper: upper.clone() },
            ConvexSetSpec::Sublevel(_) => return Err(Error::NotSerializable),
            ConvexSetSpec::Intersection(ms) => {
                SetRepr::Intersection { members: ms.iter().map(SetRepr::try_from).collect::<Result<_>>()? }
            }
        })
    }
}

impl TryFrom<SetRepr> for ConvexSetSpec {
    type Error = Error;

    fn try_from(r: SetRepr) -> Result<Self> {
        match r {
            SetRepr::Halfspace { normal, offset } => ConvexSetSpec::halfspace(normal, offset),
            SetRepr::Hyperplane { normal, offset } => ConvexSetSpec::hyperplane(normal, offset),
            SetRepr::Ball { center, radius } => ConvexSetSpec::ball(center, radius),
            SetRepr::Box { lower, upper } => ConvexSetSpec::boxed(lower, upper),
            SetRepr::Intersection { members } => ConvexSetSpec::intersection(
                members.into_iter().map(ConvexSetSpec::try_from).collect::<Result<_>>()?,
            ),
        }
    }
}

impl Serialize for ConvexSetSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SetRepr::try_from(self).map_err(serde::ser::Error::custom)?.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConvexSetSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SetRepr::deserialize(deserializer)?;
        ConvexSetSpec::try_from(repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn unit_disk_g() -> ConvexFnOracle {
        ConvexFnOracle::ball(vector![0.0, 0.0], 1.0).unwrap()
    }

    #[test]
    fn halfspace_projection_examples() {
        let h = ConvexSetSpec::halfspace(vector![1.0, 0.0], 0.0).unwrap();
        assert_eq!(h.project(&vector![2.0, 3.0]).unwrap(), vector![0.0, 3.0]);
        assert_eq!(h.project(&vector![-1.0, 5.0]).unwrap(), vector![-1.0, 5.0]);
    }

    #[test]
    fn ball_projection_matches_grid_search() {
        let ball = ConvexSetSpec::ball(vector![1.0, 0.0], 1.0).unwrap();
        let x = vector![0.0, 2.0];
        let p = ball.project(&x).unwrap();
        let s5 = 5f64.sqrt();
        assert!((p[0] - (1.0 - 1.0 / s5)).abs() < 1e-15);
        assert!((p[1] - 2.0 / s5).abs() < 1e-15);

        // Oracle: dense polar grid over the ball, keep the nearest point.
        let mut best = (f64::INFINITY, vector![0.0, 0.0]);
        let (nr, nt) = (400, 4000);
        for i in 0..=nr {
            let r = i as f64 / nr as f64;
            for j in 0..nt {
                let t = std::f64::consts::TAU * j as f64 / nt as f64;
                let y = vector![1.0 + r * t.cos(), r * t.sin()];
                let d = x.distance(&y);
                if d < best.0 {
                    best = (d, y);
                }
            }
        }
        assert!(p.distance(&best.1) < 2e-3);
        assert!(x.distance(&p) <= best.0 + 1e-12);
        assert!((p[0] - 0.552786).abs() < 1e-6 && (p[1] - 0.894427).abs() < 1e-6);
    }

    #[test]
    fn hyperplane_and_box() {
        let hp = ConvexSetSpec::hyperplane(vector![1.0, 1.0], 1.0).unwrap();
        assert_eq!(hp.project(&vector![0.0, 0.0]).unwrap(), vector![0.5, 0.5]);
        let bx = ConvexSetSpec::boxed(vector![0.0, 0.0], vector![1.0, 2.0]).unwrap();
        assert_eq!(bx.project(&vector![-1.0, 3.0]).unwrap(), vector![0.0, 2.0]);
        assert!(ConvexSetSpec::boxed(vector![1.0], vector![0.0]).is_err());
        assert!(ConvexSetSpec::halfspace(vector![0.0, 0.0], 1.0).is_err());
        assert!(ConvexSetSpec::ball(vector![0.0], 0.0).is_err());
    }

    #[test]
    fn unsupported_and_mismatch() {
        let s = ConvexSetSpec::sublevel(unit_disk_g());
        assert_eq!(s.project(&vector![2.0, 0.0]).unwrap_err(), Error::UnsupportedSet("sublevel"));
        let i = ConvexSetSpec::intersection(vec![ConvexSetSpec::ball(vector![0.0, 0.0], 1.0).unwrap()]).unwrap();
        assert_eq!(i.project(&vector![2.0, 0.0]).unwrap_err(), Error::UnsupportedSet("intersection"));
        let h = ConvexSetSpec::halfspace(vector![1.0, 0.0], 0.0).unwrap();
        assert!(matches!(h.project(&vector![1.0]), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
        assert!(matches!(h.contains(&vector![1.0, 2.0, 3.0], 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn contains_examples() {
        let ball = ConvexSetSpec::ball(vector![0.0, 0.0], 1.0).unwrap();
        assert!(ball.contains(&vector![0.0, 0.0], 0.0).unwrap());
        let h = ConvexSetSpec::halfspace(vector![1.0, 0.0], 0.0).unwrap();
        assert!(h.contains(&vector![1e-12, 0.0], 1e-9).unwrap());
        assert!(!h.contains(&vector![1e-6, 0.0], 1e-9).unwrap());
        let s = ConvexSetSpec::sublevel(unit_disk_g());
        assert!(!s.contains(&vector![2.0, 0.0], 0.0).unwrap());
        assert!(h.contains(&vector![0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn separating_halfspace_examples() {
        let g = unit_disk_g();
        let h = separating_halfspace(&g, &vector![2.0, 0.0], 0.0).unwrap();
        match &h {
            ConvexSetSpec::Halfspace { normal, offset } => {
                assert_eq!(*normal, vector![4.0, 0.0]);
                assert_eq!(offset / normal[0], 1.25);
            }
            _ => unreachable!(),
        }
        assert!(!h.contains(&vector![2.0, 0.0], 0.0).unwrap());
        // Oracle: 1000 deterministic points of the closed unit disk.
        for i in 0..1000 {
            let r = ((i % 37) as f64 / 36.0).sqrt();
            let t = i as f64 * 2.399963229728653;
            let y = vector![r * t.cos(), r * t.sin()];
            assert!(h.contains(&y, 0.0).unwrap(), "{y}");
        }

        let h = separating_halfspace(&g, &vector![2.0, 0.0], 0.5).unwrap();
        if let ConvexSetSpec::Halfspace { normal, offset } = &h {
            assert_eq!(offset / normal[0], 9.0 / 8.0);
        }

        let affine = ConvexFnOracle::affine(vector![1.0, 0.0], 0.0).unwrap();
        let h = separating_halfspace(&affine, &vector![1.0, 0.0], 0.0).unwrap();
        if let ConvexSetSpec::Halfspace { normal, offset } = &h {
            assert_eq!((normal.clone(), *offset), (vector![1.0, 0.0], 0.0));
        }
    }

    #[test]
    fn separating_halfspace_errors() {
        let g = unit_disk_g();
        assert!(matches!(separating_halfspace(&g, &vector![0.0, 0.0], 0.0), Err(Error::NotViolating(_))));
        // -1 + 2 > 0 at the minimizer: subgradient vanishes.
        assert_eq!(separating_halfspace(&g, &vector![0.0, 0.0], 2.0).unwrap_err(), Error::ZeroSubgradient);
    }

    #[test]
    fn inner_approximation_examples() {
        let g = unit_disk_g();
        let c0 = inner_approximation(&g, 0.0).unwrap();
        assert!(c0.contains(&vector![1.0, 0.0], 0.0).unwrap());
        let c = inner_approximation(&g, 0.75).unwrap();
        assert!(c.contains(&vector![0.5, 0.0], 0.0).unwrap());
        assert!(!c.contains(&vector![0.51, 0.0], 0.0).unwrap());
        let empty = inner_approximation(&g, 2.0).unwrap();
        for i in -20..=20 {
            for j in -20..=20 {
                let y = vector![i as f64 / 10.0, j as f64 / 10.0];
                assert!(!empty.contains(&y, 0.0).unwrap());
            }
        }
        assert_eq!(inner_approximation(&g, -0.1).unwrap_err(), Error::NegativeEpsilon(-0.1));
    }

    #[test]
    fn json_format() {
        let ball = ConvexSetSpec::ball(vector![1.0, 0.0], 1.0).unwrap();
        assert_eq!(ball.to_json().unwrap(), r#"{"variant":"ball","center":[1.0,0.0],"radius":1.0}"#);
        let back = ConvexSetSpec::from_json(r#"{"variant": "ball", "center": [1,0], "radius": 1}"#).unwrap();
        assert!(matches!(back, ConvexSetSpec::Ball { radius, .. } if radius == 1.0));
        let inter = ConvexSetSpec::from_json(
            r#"{"variant":"intersection","members":[{"variant":"halfspace","normal":[1,0],"offset":0},
               {"variant":"box","lower":[-1,-1],"upper":[1,1]}]}"#,
        )
        .unwrap();
        assert_eq!(inter.dim(), Some(2));
        assert!(ConvexSetSpec::from_json(r#"{"variant":"ball","center":[0],"radius":-1}"#).is_err());
        assert_eq!(ConvexSetSpec::sublevel(unit_disk_g()).to_json().unwrap_err(), Error::NotSerializable);
    }
}
