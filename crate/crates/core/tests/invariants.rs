//! Property-based invariants for sets, operators and solvers.

use fejerlab::diagnostics::{check_fejer, fejer_star_index, AnchorSet};
use fejerlab::geometry::{inner_approximation, separating_halfspace, ConvexFnOracle, ConvexSetSpec};
use fejerlab::operators::{check_property, fixed_point_residual, OperatorSpec, PropertyKind};
use fejerlab::sampling;
use fejerlab::solvers::{
    inner_approx_separating, iterate_fixed_point, sequential_projections, simultaneous_projections, EpsilonSchedule,
    IndexControl, StopRule,
};
use fejerlab::{vector, Vector};
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(-5.0f64..5.0, dim).prop_map(|v| Vector::new(v).unwrap())
}

fn unit_normal() -> impl Strategy<Value = Vector> {
    (0.0f64..std::f64::consts::TAU).prop_map(|t| vector![t.cos(), t.sin()])
}

fn closed_form_set() -> impl Strategy<Value = ConvexSetSpec> {
    prop_oneof![
        (unit_normal(), -2.0f64..2.0).prop_map(|(n, b)| ConvexSetSpec::halfspace(n, b).unwrap()),
        (unit_normal(), -2.0f64..2.0).prop_map(|(n, b)| ConvexSetSpec::hyperplane(n, b).unwrap()),
        (point(2), 0.1f64..3.0).prop_map(|(c, r)| ConvexSetSpec::ball(c, r).unwrap()),
        (point(2), 0.0f64..3.0, 0.0f64..3.0).prop_map(|(lo, w, h)| {
            let hi = vector![lo[0] + w, lo[1] + h];
            ConvexSetSpec::boxed(lo, hi).unwrap()
        }),
    ]
}

fn disk_oracle() -> ConvexFnOracle {
    ConvexFnOracle::ball(vector![0.3, -0.2], 1.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_is_idempotent(set in closed_form_set(), x in point(2)) {
        let p = set.project(&x).unwrap();
        let pp = set.project(&p).unwrap();
        prop_assert!(p.max_abs_diff(&pp) <= 1e-12 * (1.0 + p.norm()));
        prop_assert!(set.contains(&p, 1e-9).unwrap());
    }

    #[test]
    fn projection_obtuse_angle(set in closed_form_set(), x in point(2), seed in 0u64..1000) {
        let p = set.project(&x).unwrap();
        for y in sampling::uniform_points(seed, 20, 2, -6.0, 6.0) {
            let y = set.project(&y).unwrap();
            prop_assert!((&x - &p).dot(&(&y - &p)) <= 1e-9 * (1.0 + x.norm() * y.norm()));
        }
    }

    #[test]
    fn inner_approximations_nest(e1 in 0.0f64..2.0, frac in 0.0f64..=1.0, x in point(2)) {
        let e2 = e1 * frac;
        let g = disk_oracle();
        let outer = inner_approximation(&g, e2).unwrap();
        let inner = inner_approximation(&g, e1).unwrap();
        if inner.contains(&x, 0.0).unwrap() {
            prop_assert!(outer.contains(&x, 0.0).unwrap());
        }
    }

    #[test]
    fn separating_halfspace_cuts_off_the_point(x in point(2), eps in 0.0f64..1.0, seed in 0u64..1000) {
        let g = disk_oracle();
        prop_assume!(g.value(&x) + eps > 1e-6);
        let h = separating_halfspace(&g, &x, eps).unwrap();
        prop_assert!(!h.contains(&x, 0.0).unwrap());
        for y in sampling::uniform_points(seed, 50, 2, -2.0, 2.0) {
            if g.value(&y) <= -eps {
                prop_assert!(h.contains(&y, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn averaged_projections_are_nonexpansive_plus(
        sets in proptest::collection::vec(closed_form_set(), 2..4),
        seed in 0u64..1000,
    ) {
        let m = sets.len() as f64;
        let op = OperatorSpec::convex_combination(
            sets.into_iter().map(|s| (1.0 / m, OperatorSpec::projection(s))).collect(),
        ).unwrap();
        let pairs = sampling::uniform_pairs(seed, 200, 2, -4.0, 4.0);
        let r = check_property(&op, PropertyKind::NonexpansivePlus, &pairs, 1e-10).unwrap();
        prop_assert!(r.holds(), "worst slack {}", r.worst_slack);
    }

    #[test]
    fn composed_projections_are_nonexpansive(
        sets in proptest::collection::vec(closed_form_set(), 2..4),
        seed in 0u64..1000,
    ) {
        let op = OperatorSpec::composition(sets.into_iter().map(OperatorSpec::projection).collect()).unwrap();
        let pairs = sampling::uniform_pairs(seed, 200, 2, -4.0, 4.0);
        let r = check_property(&op, PropertyKind::Nonexpansive, &pairs, 1e-10).unwrap();
        prop_assert!(r.holds(), "worst slack {}", r.worst_slack);
    }

    #[test]
    fn projection_residual_vanishes_exactly_on_the_set(set in closed_form_set(), x in point(2)) {
        let op = OperatorSpec::projection(set.clone());
        let inside = set.project(&x).unwrap();
        prop_assert!(fixed_point_residual(&op, &inside).unwrap() <= 1e-12 * (1.0 + inside.norm()));
        if !set.contains(&x, 1e-6).unwrap() {
            prop_assert!(fixed_point_residual(&op, &x).unwrap() > 0.0);
        }
    }

    #[test]
    fn scaled_identity_modulus(c in -0.99f64..0.99, seed in 0u64..1000) {
        prop_assume!(c.abs() > 1e-3);
        let op = OperatorSpec::scaled_identity(2, c);
        let pairs = sampling::uniform_pairs(seed, 50, 2, -3.0, 3.0);
        let r = check_property(&op, PropertyKind::Contraction, &pairs, 1e-12).unwrap();
        prop_assert!((r.estimated_tau.unwrap() - c.abs()).abs() <= 1e-12);
    }

    #[test]
    fn projection_methods_are_fejer(
        sets in proptest::collection::vec(
            (point(2), 1.0f64..3.0).prop_map(|(c, r)| ConvexSetSpec::ball(c.map(|v| v * 0.1), r).unwrap()),
            2..4,
        ),
        x0 in point(2),
        seed in 0u64..1000,
    ) {
        // Balls of radius at least 1 centred within 0.5 of the origin share a neighbourhood of it.
        let mut rng = sampling::rng(seed);
        let anchors: Vec<Vector> = (0..10).map(|_| sampling::uniform_point(&mut rng, 2, -0.3, 0.3)).collect();
        let anchors = AnchorSet::new("C", anchors).unwrap();
        let stop = StopRule::new(200, 1e-12, 1e-9).unwrap();
        let w = vec![1.0 / sets.len() as f64; sets.len()];
        for t in [
            sequential_projections(&sets, &x0, &stop).unwrap(),
            simultaneous_projections(&sets, &w, &x0, &stop).unwrap(),
        ] {
            if t.len() >= 2 {
                prop_assert!(check_fejer(&t, &anchors, 1e-9).unwrap().iter().all(|r| r.monotone));
            }
        }
    }

    #[test]
    fn inner_approx_respects_slater_index(x0 in point(2), scale in 0.5f64..2.0) {
        let fns = vec![
            ConvexFnOracle::ball(vector![-0.5, 0.0], 1.0).unwrap(),
            ConvexFnOracle::ball(vector![0.5, 0.0], 1.0).unwrap(),
        ];
        let y = vector![0.0, 0.0];
        let depth = -fns.iter().map(|g| g.value(&y)).fold(f64::NEG_INFINITY, f64::max);
        let schedule = EpsilonSchedule::Harmonic { scale };
        let bound = schedule.first_below(depth, 10_000).unwrap();
        let stop = StopRule::new(2000, 1e-12, 1e-9).unwrap();
        for control in [IndexControl::Cyclic, IndexControl::MostViolated] {
            let t = inner_approx_separating(&fns, &x0, &schedule, control, &stop).unwrap();
            if t.len() >= 2 {
                let n = fejer_star_index(&t, &y, 1e-9);
                prop_assert!(n.is_some_and(|n| n <= bound), "N = {:?}, bound {}", n, bound);
            }
        }
    }

    #[test]
    fn contraction_residuals_decay_at_the_modulus(theta in 0.0f64..6.28, c in 0.1f64..0.9, x0 in point(2)) {
        let op = OperatorSpec::composition(vec![OperatorSpec::rotation(theta), OperatorSpec::scaled_identity(2, c)]).unwrap();
        let pairs = sampling::uniform_pairs(1, 100, 2, -3.0, 3.0);
        let tau = check_property(&op, PropertyKind::Contraction, &pairs, 1e-12).unwrap().estimated_tau.unwrap();
        let t = iterate_fixed_point(&op, &x0, &StopRule::new(60, 1e-300, 0.0).unwrap()).unwrap();
        let res: Vec<f64> = t.iterates.windows(2).map(|w| w[1].distance(&w[0])).collect();
        for r in res.windows(2) {
            prop_assert!(r[1] <= tau * r[0] * (1.0 + 1e-9) + 1e-300);
        }
    }
}
