//! The arc sequence: alternate a horizontal push of `2^{-ℓ}` with a return to
//! the vertical axis on the circle around `(1, 0)` through the pushed point.
//!
//! ```text
//! x⁰ = (0, 2)
//! x^{2ℓ+1} = x^{2ℓ} + (2^{-ℓ}, 0)
//! x^{2ℓ+2} = (0, sqrt(‖x^{2ℓ+1} − (1, 0)‖² − 1))
//! ```
//!
//! It converges to `(0, sqrt(4/3))`, is Fejér* monotone with respect to every
//! `(λ, 0)` with `0 < λ ≤ 1`, and not with respect to the origin.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::float::FloatCore;

use crate::geometry::Vector;

/// `v = m · 2^e` exactly.
fn dyadic(v: f64) -> (BigInt, i32) {
    let (m, e, sign) = FloatCore::integer_decode(v);
    (BigInt::from(m) * sign, e as i32)
}

fn square(v: f64) -> (BigInt, i32) {
    let (m, e) = dyadic(v);
    (&m * &m, 2 * e)
}

/// Exact comparison of two sums of dyadic terms.
fn compare_sums(lhs: &[(BigInt, i32)], rhs: &[(BigInt, i32)]) -> Ordering {
    let emin = lhs.iter().chain(rhs).map(|t| t.1).min().unwrap_or(0);
    let total = |terms: &[(BigInt, i32)]| -> BigInt { terms.iter().map(|(m, e)| m << ((e - emin) as usize)).sum() };
    total(lhs).cmp(&total(rhs))
}

/// `b² ≤ (a − 1)² + β² − 1`, i.e. `b² + 2a ≤ a² + β²`, decided exactly.
fn square_at_most(b: f64, a: f64, beta: f64) -> bool {
    let lhs = [square(b), dyadic(2.0 * a)];
    let rhs = [square(a), square(beta)];
    compare_sums(&lhs, &rhs) != Ordering::Greater
}

/// Height of the return step: the largest double `b` with
/// `b² ≤ (a − 1)² + β² − 1`, the right-hand side evaluated exactly.
/// Rounding down keeps every return step non-expanding towards each `(λ, 0)`.
pub fn return_height(a: f64, beta: f64) -> f64 {
    let mut b = ((a - 1.0) * (a - 1.0) + beta * beta - 1.0).max(0.0).sqrt();
    while b > 0.0 && !square_at_most(b, a, beta) {
        b = b.next_down();
    }
    while square_at_most(b.next_up(), a, beta) {
        b = b.next_up();
    }
    b
}

/// The first `n` iterates.
pub fn arc_iterates(n: usize) -> Vec<Vector> {
    let mut out = Vec::with_capacity(n);
    let (mut alpha, mut beta) = (0.0f64, 2.0f64);
    let mut push = 1.0f64;
    for k in 0..n {
        out.push(Vector::from_raw(vec![alpha, beta]));
        if k % 2 == 0 {
            alpha = push;
        } else {
            beta = return_height(alpha, beta);
            alpha = 0.0;
            push *= 0.5;
        }
    }
    out
}

/// `β²_{2L}` in closed form: `4/3 − (4/3)·4^{-L} + 4·2^{-L}`.
pub fn beta_sq_closed_form(l: u32) -> f64 {
    let q = 0.25f64.powi(l as i32);
    let h = 0.5f64.powi(l as i32);
    4.0 / 3.0 - 4.0 / 3.0 * q + 4.0 * h
}

/// `β²_{2L}` by the scalar recursion `β²_{2ℓ+2} = 4^{-ℓ} − 2·2^{-ℓ} + β²_{2ℓ}`, `β²_0 = 4`.
pub fn beta_sq_recursion(l: u32) -> f64 {
    (0..l).fold(4.0, |b, j| {
        let a = 0.5f64.powi(j as i32);
        a * a - 2.0 * a + b
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn return_height_is_tight() {
        let b = return_height(1.0, 2.0);
        assert!(b <= 3f64.sqrt() && b >= 3f64.sqrt().next_down());
        assert!(square_at_most(b, 1.0, 2.0));
        assert!(!square_at_most(b.next_up(), 1.0, 2.0));
        let c = return_height(0.5, b);
        assert!(c < 1.5 && 1.5 - c <= 1e-15);
        let b = return_height(0.25, 1.5);
        assert!((b - 1.8125f64.sqrt()).abs() <= f64::EPSILON * 2.0);
    }

    #[test]
    fn closed_form_matches_recursion() {
        for l in 0..40 {
            let (c, r) = (beta_sq_closed_form(l), beta_sq_recursion(l));
            assert!((c - r).abs() <= 1e-14, "L = {l}: {c} vs {r}");
        }
        assert_eq!(beta_sq_recursion(1), 3.0);
        assert_eq!(beta_sq_recursion(2), 2.25);
        assert!((beta_sq_recursion(30) - 4.0 / 3.0).abs() <= 1e-8);
    }
}
