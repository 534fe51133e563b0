//! Exact comparisons of squared-distance increments.
//!
//! `Δ = ‖p − x‖² − ‖q − x‖²` is evaluated as `⟨p − q, p + q − 2x⟩` together
//! with a forward error bound; only when the comparison falls inside that
//! bound is it redone in exact rational arithmetic. Classifications made with
//! zero tolerance are therefore exact for the stored floating-point iterates.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use crate::geometry::Vector;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Floating-point estimate of `Δ` and a bound on its absolute error.
pub(crate) fn increment_estimate(p: &Vector, q: &Vector, x: &Vector) -> (f64, f64) {
    let n = p.dim() as f64;
    let mut est = 0.0;
    let mut mag = 0.0;
    for ((&pi, &qi), &xi) in p.as_slice().iter().zip(q.as_slice()).zip(x.as_slice()) {
        let d = pi - qi;
        let s = (pi + qi) - 2.0 * xi;
        est += d * s;
        mag += d.abs() * (pi.abs() + qi.abs() + 2.0 * xi.abs());
    }
    let bound = 2.0 * (n + 4.0) * UNIT_ROUNDOFF * mag + 8.0 * n * f64::MIN_POSITIVE;
    (est, bound)
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite value")
}

fn increment_exact(p: &Vector, q: &Vector, x: &Vector) -> BigRational {
    let mut acc = BigRational::zero();
    for ((&pi, &qi), &xi) in p.as_slice().iter().zip(q.as_slice()).zip(x.as_slice()) {
        let (pi, qi, xi) = (rat(pi), rat(qi), rat(xi));
        let a = &pi - &xi;
        let b = &qi - &xi;
        acc += &a * &a - &b * &b;
    }
    acc
}

/// Compares `Δ` with `threshold` exactly.
pub(crate) fn compare_increment(p: &Vector, q: &Vector, x: &Vector, threshold: f64) -> Ordering {
    let (est, bound) = increment_estimate(p, q, x);
    let diff = est - threshold;
    let slack = bound + UNIT_ROUNDOFF * (est.abs() + threshold.abs()) * 2.0;
    if diff > slack {
        Ordering::Greater
    } else if diff < -slack {
        Ordering::Less
    } else {
        increment_exact(p, q, x).cmp(&rat(threshold))
    }
}

/// Exact sign of `‖p − x‖² − ‖q − x‖²`.
pub fn increment_sign(p: &Vector, q: &Vector, x: &Vector) -> Ordering {
    compare_increment(p, q, x, 0.0)
}

/// Squared-distance increment `‖p − x‖² − ‖q − x‖²` with the correct sign;
/// exact zero whenever the true increment is zero.
pub fn squared_increment(p: &Vector, q: &Vector, x: &Vector) -> f64 {
    match increment_sign(p, q, x) {
        Ordering::Equal => 0.0,
        s => {
            let (est, _) = increment_estimate(p, q, x);
            if est == 0.0 || (est > 0.0) != (s == Ordering::Greater) {
                // Estimate lost the sign; fall back to the rounded exact value.
                num_traits::ToPrimitive::to_f64(&increment_exact(p, q, x)).unwrap_or(0.0)
            } else {
                est
            }
        }
    }
}

/// A certified upper bound on a positive increment; zero when `Δ ≤ 0`.
pub fn increment_upper_bound(p: &Vector, q: &Vector, x: &Vector) -> f64 {
    if increment_sign(p, q, x) != Ordering::Greater {
        return 0.0;
    }
    let (est, bound) = increment_estimate(p, q, x);
    if est > 0.0 && compare_increment(p, q, x, est) != Ordering::Greater {
        return est;
    }
    let candidate = est.max(0.0) + bound;
    if compare_increment(p, q, x, candidate) == Ordering::Greater {
        // Unreachable with a sound bound; keep the certificate valid regardless.
        num_traits::ToPrimitive::to_f64(&increment_exact(p, q, x)).map_or(candidate, |v| v.next_up())
    } else {
        candidate
    }
}

/// Whether the step `prev → next` moves away from `anchor` beyond the relative
/// tolerance, i.e. `‖next − a‖ > ‖prev − a‖ + tol · (1 + ‖prev − a‖)`.
/// With `tol == 0` the comparison is exact.
pub fn moves_away(next: &Vector, prev: &Vector, anchor: &Vector, tol: f64) -> bool {
    if tol == 0.0 {
        return increment_sign(next, prev, anchor) == Ordering::Greater;
    }
    let d = prev.distance(anchor);
    let t = tol * (1.0 + d);
    compare_increment(next, prev, anchor, t * (2.0 * d + t)) == Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;
    use proptest::prelude::*;

    #[test]
    fn resolves_tiny_increments_beyond_rounding() {
        let b = 1.1547005383792517;
        let a = 2f64.powi(-99);
        let origin = vector![0.0, 0.0];
        assert_eq!(increment_sign(&vector![a, b], &vector![0.0, b], &origin), Ordering::Greater);
        assert_eq!(squared_increment(&vector![a, b], &vector![0.0, b], &origin), a * a);
        assert_eq!(increment_sign(&vector![0.0, b], &vector![0.0, b], &origin), Ordering::Equal);
    }

    #[test]
    fn exact_zero_on_symmetric_step() {
        // (0,2) -> (1,2) keeps the distance to (1/2, 0).
        let w = vector![0.5, 0.0];
        assert_eq!(increment_sign(&vector![1.0, 2.0], &vector![0.0, 2.0], &w), Ordering::Equal);
        assert!(!moves_away(&vector![1.0, 2.0], &vector![0.0, 2.0], &w, 0.0));
    }

    #[test]
    fn relative_tolerance() {
        let x = vector![0.0];
        assert!(!moves_away(&vector![1.0 + 1e-12], &vector![1.0], &x, 1e-9));
        assert!(moves_away(&vector![1.0 + 1e-6], &vector![1.0], &x, 1e-9));
    }

    proptest! {
        #[test]
        fn sign_agrees_with_exact_arithmetic(
            p in proptest::collection::vec(-1e3f64..1e3, 3),
            q in proptest::collection::vec(-1e3f64..1e3, 3),
            x in proptest::collection::vec(-1e3f64..1e3, 3),
        ) {
            let (p, q, x) = (Vector::new(p).unwrap(), Vector::new(q).unwrap(), Vector::new(x).unwrap());
            let exact = increment_exact(&p, &q, &x);
            prop_assert_eq!(increment_sign(&p, &q, &x), exact.cmp(&BigRational::zero()));
            let ub = increment_upper_bound(&p, &q, &x);
            prop_assert!(rat(ub) >= exact);
        }
    }
}
