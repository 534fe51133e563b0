use serde::{Deserialize, Serialize};

use super::OperatorSpec;
use crate::error::{Error, Result};
use crate::geometry::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyKind {
    Contraction,
    Nonexpansive,
    FirmlyNonexpansive,
    NonexpansivePlus,
}

impl std::str::FromStr for PropertyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contraction" => Ok(PropertyKind::Contraction),
            "nonexpansive" => Ok(PropertyKind::Nonexpansive),
            "firmly-nonexpansive" => Ok(PropertyKind::FirmlyNonexpansive),
            "nonexpansive-plus" => Ok(PropertyKind::NonexpansivePlus),
            other => Err(Error::UnknownName { kind: "operator property", name: other.to_string() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub x: Vector,
    pub y: Vector,
    pub slack: f64,
}

/// Result of a sampled property check. Passing means no violation was found
/// over the supplied pairs, not that the property holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyKind,
    pub samples: usize,
    pub worst_slack: f64,
    pub estimated_tau: Option<f64>,
    pub violations: Vec<Violation>,
    pub tol: f64,
}

impl PropertyReport {
    /// No violations, and for contractions an estimated modulus below `1 − tol`.
    pub fn holds(&self) -> bool {
        let tau_ok = match self.property {
            PropertyKind::Contraction => self.estimated_tau.is_some_and(|t| t < 1.0 - self.tol),
            _ => true,
        };
        self.violations.is_empty() && tau_ok
    }
}

struct PairImage {
    dx: Vector,
    dt: Vector,
}

/// Evaluates the slack of `property` at every pair. Violations are pairs whose
/// slack falls below `-tol`, listed in pair order.
pub fn check_property(
    op: &OperatorSpec,
    property: PropertyKind,
    pairs: &[(Vector, Vector)],
    tol: f64,
) -> Result<PropertyReport> {
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
    }
    let images = pairs
        .iter()
        .map(|(x, y)| {
            let tx = op.apply(x)?;
            let ty = op.apply(y)?;
            Ok(PairImage { dx: x - y, dt: &tx - &ty })
        })
        .collect::<Result<Vec<_>>>()?;

    let estimated_tau = match property {
        PropertyKind::Contraction => images
            .iter()
            .filter(|p| p.dx.norm() > 0.0)
            .map(|p| p.dt.norm() / p.dx.norm())
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r)))),
        _ => None,
    };

    let slacks: Vec<f64> = images
        .iter()
        .map(|p| {
            let nx = p.dx.norm();
            let nt = p.dt.norm();
            match property {
                PropertyKind::Contraction => match estimated_tau {
                    Some(tau) if nx > 0.0 => tau * nx - nt,
                    _ => 0.0,
                },
                PropertyKind::Nonexpansive => nx - nt,
                PropertyKind::FirmlyNonexpansive => {
                    let gap = &p.dt - &p.dx;
                    nx * nx - gap.norm_sq() - nt * nt
                }
                PropertyKind::NonexpansivePlus => {
                    let base = nx - nt;
                    if (nt - nx).abs() <= tol {
                        base.min(-(&p.dt - &p.dx).norm())
                    } else {
                        base
                    }
                }
            }
        })
        .collect();

    let worst_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let violations = slacks
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < -tol)
        .map(|(index, &slack)| Violation { index, x: pairs[index].0.clone(), y: pairs[index].1.clone(), slack })
        .collect();

    Ok(PropertyReport { property, samples: pairs.len(), worst_slack, estimated_tau, violations, tol })
}
