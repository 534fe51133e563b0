use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shrinking slack `ε_k` for the inner approximations `{g + ε_k ≤ 0}`.
/// Indexing starts at `k = 0`, so `Harmonic` is `scale / (k + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EpsilonSchedule {
    Harmonic { scale: f64 },
    Geometric { base: f64, ratio: f64 },
    Constant { value: f64 },
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EpsilonSchedule::Harmonic { scale } => scale.is_finite() && scale > 0.0,
            EpsilonSchedule::Geometric { base, ratio } => base.is_finite() && base > 0.0 && ratio > 0.0 && ratio < 1.0,
            EpsilonSchedule::Constant { value } => value.is_finite() && value >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid epsilon schedule {self}")))
        }
    }

    /// Harmonic and geometric schedules are positive and decrease to zero.
    pub fn is_vanishing(&self) -> bool {
        !matches!(self, EpsilonSchedule::Constant { .. })
    }

    pub fn epsilon(&self, k: usize) -> f64 {
        match *self {
            EpsilonSchedule::Harmonic { scale } => scale / (k as f64 + 1.0),
            EpsilonSchedule::Geometric { base, ratio } => base * ratio.powi(k.min(i32::MAX as usize) as i32),
            EpsilonSchedule::Constant { value } => value,
        }
    }

    /// First `k` with `ε_k < level`, searching up to `limit`.
    pub fn first_below(&self, level: f64, limit: usize) -> Option<usize> {
        (0..=limit).find(|&k| self.epsilon(k) < level)
    }
}

impl fmt::Display for EpsilonSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSchedule::Harmonic { scale } => write!(f, "harmonic:{scale}"),
            EpsilonSchedule::Geometric { base, ratio } => write!(f, "geometric:{base},{ratio}"),
            EpsilonSchedule::Constant { value } => write!(f, "constant:{value}"),
        }
    }
}

/// Parses `harmonic:<scale>`, `geometric:<base>,<ratio>` or `constant:<value>`.
impl FromStr for EpsilonSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| a.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(format!("schedule `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let sched = match (kind, nums.as_slice()) {
            ("harmonic", []) => EpsilonSchedule::Harmonic { scale: 1.0 },
            ("harmonic", [scale]) => EpsilonSchedule::Harmonic { scale: *scale },
            ("geometric", [base, ratio]) => EpsilonSchedule::Geometric { base: *base, ratio: *ratio },
            ("constant", [value]) => EpsilonSchedule::Constant { value: *value },
            _ => return Err(Error::InvalidParameter(format!("cannot parse epsilon schedule `{s}`"))),
        };
        sched.validate()?;
        Ok(sched)
    }
}

/// Which constraint the inner-approximation method works on at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum IndexControl {
    Cyclic,
    #[default]
    MostViolated,
}

impl FromStr for IndexControl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(IndexControl::Cyclic),
            "most-violated" => Ok(IndexControl::MostViolated),
            other => Err(Error::UnknownName { kind: "index control", name: other.to_string() }),
        }
    }
}

impl fmt::Display for IndexControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexControl::Cyclic => "cyclic",
            IndexControl::MostViolated => "most-violated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_iters: usize,
    pub residual_tol: f64,
    pub feasibility_tol: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { max_iters: 1000, residual_tol: 1e-12, feasibility_tol: 1e-9 }
    }
}

impl StopRule {
    pub fn new(max_iters: usize, residual_tol: f64, feasibility_tol: f64) -> Result<Self> {
        let rule = StopRule { max_iters, residual_tol, feasibility_tol };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.residual_tol >= 0.0 && self.feasibility_tol >= 0.0) {
            return Err(Error::InvalidParameter("stop tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}
