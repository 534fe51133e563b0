use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fejer::{fejer_star_index, require_dims, require_len};
use super::predicate::{compare_increment, increment_sign, increment_upper_bound, squared_increment};
use super::AnchorSet;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::solvers::Trace;

/// Tail-ratio threshold below which a fitted sequence is reported as
/// consistent with summability.
pub const SUMMABLE_TAIL_RATIO: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuasiFejerType {
    I,
    II,
    III,
}

impl FromStr for QuasiFejerType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(QuasiFejerType::I),
            "II" | "2" => Ok(QuasiFejerType::II),
            "III" | "3" => Ok(QuasiFejerType::III),
            _ => Err(Error::UnknownName { kind: "quasi-Fejér type", name: s.to_string() }),
        }
    }
}

impl fmt::Display for QuasiFejerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuasiFejerType::I => "I",
            QuasiFejerType::II => "II",
            QuasiFejerType::III => "III",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Summability {
    #[serde(rename = "consistent with summable")]
    ConsistentWithSummable,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Summability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Summability::ConsistentWithSummable => "consistent with summable",
            Summability::Inconclusive => "inconclusive",
        })
    }
}

/// A fitted perturbation sequence with its summability evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFit {
    pub epsilons: Vec<f64>,
    pub partial_sum: f64,
    pub tail_ratio: f64,
    pub summability: Summability,
}

impl EpsilonFit {
    pub fn from_epsilons(epsilons: Vec<f64>) -> Self {
        let partial_sum: f64 = epsilons.iter().sum();
        let tail_len = epsilons.len().div_ceil(4);
        let tail: f64 = epsilons[epsilons.len() - tail_len..].iter().sum();
        let tail_ratio = if partial_sum > 0.0 { tail / partial_sum } else { 0.0 };
        let summability = if tail_ratio <= SUMMABLE_TAIL_RATIO {
            Summability::ConsistentWithSummable
        } else {
            Summability::Inconclusive
        };
        EpsilonFit { epsilons, partial_sum, tail_ratio, summability }
    }

    pub fn nonzeros(&self) -> usize {
        self.epsilons.iter().filter(|&&e| e != 0.0).count()
    }
}

/// `fits` holds one entry for Types I and II (uniform over anchors) and one
/// per anchor for Type III.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiFejerFit {
    pub kind: QuasiFejerType,
    pub fits: Vec<EpsilonFit>,
}

/// Positive part of the distance increment, exactly zero when the step does not move away.
fn distance_increase(p: &Vector, q: &Vector, x: &Vector) -> f64 {
    if increment_sign(p, q, x) == Ordering::Greater {
        (p.distance(x) - q.distance(x)).max(0.0)
    } else {
        0.0
    }
}

fn squared_increase(p: &Vector, q: &Vector, x: &Vector) -> f64 {
    squared_increment(p, q, x).max(0.0)
}

fn per_step(trace: &Trace, x: &Vector, f: fn(&Vector, &Vector, &Vector) -> f64) -> Vec<f64> {
    trace.iterates.windows(2).map(|w| f(&w[1], &w[0], x)).collect()
}

fn sup_over(trace: &Trace, anchors: &AnchorSet, f: fn(&Vector, &Vector, &Vector) -> f64) -> Vec<f64> {
    let mut eps = vec![0.0f64; trace.len() - 1];
    for a in anchors {
        for (e, v) in eps.iter_mut().zip(per_step(trace, a, f)) {
            *e = e.max(v);
        }
    }
    eps
}

/// Smallest nonnegative `ε_k` making the trace quasi-Fejér of the given type.
pub fn fit_quasi_fejer(trace: &Trace, anchors: &AnchorSet, kind: QuasiFejerType) -> Result<QuasiFejerFit> {
    require_len(trace, 2)?;
    require_dims(trace, anchors)?;
    let fits = match kind {
        QuasiFejerType::I => vec![EpsilonFit::from_epsilons(sup_over(trace, anchors, distance_increase))],
        QuasiFejerType::II => vec![EpsilonFit::from_epsilons(sup_over(trace, anchors, squared_increase))],
        QuasiFejerType::III => anchors
            .iter()
            .map(|a| EpsilonFit::from_epsilons(per_step(trace, a, squared_increase)))
            .collect(),
    };
    Ok(QuasiFejerFit { kind, fits })
}

/// The Type III witness built from a Fejér* index `n`: the positive part of
/// each squared-distance increment before `n`, zero from `n` on.
///
/// Positive entries are rounded up by the evaluation error bound so the
/// returned sequence certifies the inequality exactly.
pub fn quasi_fejer3_witness(trace: &Trace, x: &Vector, n: usize, tol: f64) -> Result<Vec<f64>> {
    require_len(trace, 2)?;
    x.ensure_dim(trace.dim())?;
    let k = trace.len() - 1;
    if n > k {
        return Err(Error::InvalidN { n, k: k - 1 });
    }
    match fejer_star_index(trace, x, tol) {
        Some(minimal) if minimal <= n => {}
        Some(minimal) => return Err(Error::InvalidN { n, k: minimal - 1 }),
        None => return Err(Error::InvalidN { n, k: k - 1 }),
    }
    Ok(trace
        .iterates
        .windows(2)
        .enumerate()
        .map(|(j, w)| if j < n { increment_upper_bound(&w[1], &w[0], x) } else { 0.0 })
        .collect())
}

/// Checks `‖x^{k+1} − x‖² ≤ ‖x^k − x‖² + ε_k + slack_k` at every step, where
/// `slack_k` is the relative tolerance allowance (zero for `tol == 0`, which
/// makes the check exact). Returns the first failing index.
pub fn verify_type3(trace: &Trace, x: &Vector, epsilons: &[f64], tol: f64) -> Result<Option<usize>> {
    x.ensure_dim(trace.dim())?;
    if epsilons.len() + 1 < trace.len() {
        return Err(Error::LengthMismatch { expected: trace.len() - 1, found: epsilons.len() });
    }
    Ok(trace.iterates.windows(2).zip(epsilons).position(|(w, &e)| {
        let slack = if tol == 0.0 {
            0.0
        } else {
            let d = w[0].distance(x);
            let t = tol * (1.0 + d);
            t * (2.0 * d + t)
        };
        compare_increment(&w[1], &w[0], x, e + slack) == Ordering::Greater
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn shrinking() -> Trace {
        Trace::from_iterates((0..6).map(|k| vector![0.5f64.powi(k), 0.0]).collect()).unwrap()
    }

    #[test]
    fn fejer_trace_fits_zero() {
        let a = AnchorSet::singleton("o", vector![0.0, 0.0]);
        for kind in [QuasiFejerType::I, QuasiFejerType::II, QuasiFejerType::III] {
            let fit = fit_quasi_fejer(&shrinking(), &a, kind).unwrap();
            assert!(fit.fits.iter().all(|f| f.partial_sum == 0.0 && f.nonzeros() == 0));
            assert_eq!(fit.fits[0].summability, Summability::ConsistentWithSummable);
        }
        assert_eq!(quasi_fejer3_witness(&shrinking(), &vector![0.0, 0.0], 0, 0.0).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn tail_ratio_classification() {
        let late = EpsilonFit::from_epsilons(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(late.tail_ratio, 1.0);
        assert_eq!(late.summability, Summability::Inconclusive);
        let early = EpsilonFit::from_epsilons(vec![1.0, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(early.tail_ratio, 0.0);
        assert_eq!(serde_json::to_string(&early.summability).unwrap(), "\"consistent with summable\"");
    }

    #[test]
    fn witness_rejects_invalid_index() {
        let t = Trace::from_iterates(vec![vector![0.0], vector![1.0], vector![2.0], vector![1.5]]).unwrap();
        let x = vector![0.0];
        assert!(matches!(quasi_fejer3_witness(&t, &x, 1, 0.0), Err(Error::InvalidN { .. })));
        let w = quasi_fejer3_witness(&t, &x, 2, 0.0).unwrap();
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1], 3.0);
        assert_eq!(w[2], 0.0);
        assert_eq!(verify_type3(&t, &x, &w, 0.0).unwrap(), None);
        assert_eq!(verify_type3(&t, &x, &[0.0; 3], 0.0).unwrap(), Some(0));
    }

    #[test]
    fn type_names_parse() {
        assert_eq!("ii".parse::<QuasiFejerType>().unwrap(), QuasiFejerType::II);
        assert!("IV".parse::<QuasiFejerType>().is_err());
    }
}
