use std::f64::consts::{PI, SQRT_2};

use hidden_measurement::analysis::{chsh, correlation, scan, theta_grid, ChshSetup};
use hidden_measurement::operational::{
    check_compatibility, check_product_criterion, check_separability, classify, is_classical_joint,
    is_classical_test, ExperimentTriple, JointOutcomeProb, OutcomeProb, Tolerance,
};
use hidden_measurement::singlet::{
    experiment_triple, joint_distribution_analytic, sequential_joint_distribution, JointTestSpec,
    Order,
};
use hidden_measurement::sphere::{
    from_density_matrix, outcome_probability, projection, to_density_matrix, BlochState, Direction,
    Epsilon,
};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..=PI, 0.0..2.0 * PI).prop_map(|(t, p)| Direction::from_angles(t, p).unwrap())
}

fn state() -> impl Strategy<Value = BlochState> {
    (0.0..=1.0f64, 0.0..=PI, 0.0..2.0 * PI)
        .prop_map(|(r, t, p)| BlochState::from_polar(r, t, p).unwrap())
}

fn positive_epsilon() -> impl Strategy<Value = Epsilon> {
    (1e-6..=1.0f64).prop_map(|e| Epsilon::new(e).unwrap())
}

fn probability() -> impl Strategy<Value = OutcomeProb> {
    (0.0..=1.0f64).prop_map(|p| OutcomeProb::from_yes(p).unwrap())
}

/// Joint distribution with every cell a multiple of 1/8.
fn eighths_joint() -> impl Strategy<Value = JointOutcomeProb> {
    prop::collection::vec(0usize..4, 8).prop_map(|cells| {
        let mut p = [0.0; 4];
        for c in cells {
            p[c] += 0.125;
        }
        JointOutcomeProb::from_array(p).unwrap()
    })
}

fn eighths_outcome() -> impl Strategy<Value = OutcomeProb> {
    (0u32..=8).prop_map(|k| OutcomeProb::from_yes(k as f64 / 8.0).unwrap())
}

fn deterministic() -> impl Strategy<Value = OutcomeProb> {
    any::<bool>().prop_map(|yes| {
        if yes {
            OutcomeProb::certain_yes()
        } else {
            OutcomeProb::certain_no()
        }
    })
}

fn exact() -> Tolerance {
    Tolerance::new(f64::MIN_POSITIVE).unwrap()
}

proptest! {
    #[test]
    fn separability_implies_compatibility(left in probability(), right in probability()) {
        let t = ExperimentTriple::new(left, right, JointOutcomeProb::product(left, right));
        let tol = Tolerance::new(1e-12).unwrap();
        prop_assert!(check_separability(&t, tol).unwrap().holds);
        prop_assert!(check_compatibility(&t, tol).unwrap().holds);
    }

    #[test]
    fn product_criterion_decides_separability_when_compatible(joint in eighths_joint()) {
        let t = ExperimentTriple::new(joint.left_marginal(), joint.right_marginal(), joint);
        prop_assert!(check_compatibility(&t, exact()).unwrap().holds);
        prop_assert_eq!(
            check_separability(&t, exact()).unwrap().holds,
            check_product_criterion(&joint, exact()).unwrap()
        );
    }

    #[test]
    fn classical_tests_compatible_iff_separated(
        left in deterministic(),
        right in deterministic(),
        joint in eighths_joint(),
    ) {
        let tol = Tolerance::default();
        let t = ExperimentTriple::new(left, right, joint);
        let comp = check_compatibility(&t, tol).unwrap().holds;
        prop_assert_eq!(comp, check_separability(&t, tol).unwrap().holds);
        if comp {
            prop_assert!(is_classical_joint(&joint, tol));
        }
    }

    #[test]
    fn classify_separated_only_when_compatible(
        left in eighths_outcome(),
        right in eighths_outcome(),
        joint in eighths_joint(),
        tol in 1e-9..0.2f64,
    ) {
        let r = classify(&ExperimentTriple::new(left, right, joint), Tolerance::new(tol).unwrap()).unwrap();
        prop_assert!(!r.separated || r.compatible);
    }

    #[test]
    fn outcome_probabilities_sum_to_one(s in state(), u in direction(), e in 0.0..=1.0f64) {
        let p = outcome_probability(&s, &u, Epsilon::new(e).unwrap());
        prop_assert!((p.p_yes + p.p_no - 1.0).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&p.p_yes) && (0.0..=1.0).contains(&p.p_no));
    }

    #[test]
    fn classical_limit_makes_every_test_classical(s in state(), u in direction()) {
        let p = outcome_probability(&s, &u, Epsilon::CLASSICAL);
        prop_assert!(is_classical_test(&p, Tolerance::default()));
    }

    #[test]
    fn quantum_limit_on_surface(u in direction(), v in direction()) {
        let s = BlochState::surface(v);
        let p = outcome_probability(&s, &u, Epsilon::QUANTUM);
        // Half-angle identities without recovering the angle.
        let c = u.dot(&v);
        prop_assert!((p.p_yes - (1.0 + c) / 2.0).abs() <= 1e-15);
        let theta = c.clamp(-1.0, 1.0).acos();
        prop_assert!((p.p_yes - (theta / 2.0).cos().powi(2)).abs() <= 1e-9);
    }

    #[test]
    fn probability_monotone_in_projection_and_epsilon(
        e in 0.05..=1.0f64,
        x in 0.0..1.0f64,
        y in 0.0..1.0f64,
        shrink in 0.1..1.0f64,
    ) {
        let eps = Epsilon::new(e).unwrap();
        let north = Direction::north();
        let at = |a: f64, eps: Epsilon| {
            outcome_probability(&BlochState::from_vector([0.0, 0.0, a]).unwrap(), &north, eps).p_yes
        };
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let (a_lo, a_hi) = (-e + 2.0 * e * lo, -e + 2.0 * e * hi);
        prop_assert!(at(a_lo, eps) <= at(a_hi, eps));
        // For a > 0 inside the elastic, a longer elastic lowers p_yes.
        let a = e * x;
        let longer = Epsilon::new((e / shrink).min(1.0)).unwrap();
        prop_assert!(at(a, longer) <= at(a, eps));
    }

    #[test]
    fn projection_is_bounded(s in state(), u in direction()) {
        let a = projection(&s, &u);
        prop_assert!(a.abs() <= s.radius() + 1e-15);
    }

    #[test]
    fn density_matrix_properties(s in state()) {
        let d = to_density_matrix(&s);
        let r = s.radius();
        prop_assert!(d.is_hermitian(1e-12));
        prop_assert!((d.trace().re - 1.0).abs() <= 1e-12);
        let [lo, hi] = d.eigenvalues();
        prop_assert!((lo - (1.0 - r) / 2.0).abs() <= 1e-12);
        prop_assert!((hi - (1.0 + r) / 2.0).abs() <= 1e-12);
        let back = from_density_matrix(&d).unwrap();
        for (x, y) in back.vector().iter().zip(s.vector()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn order_invariance_for_positive_epsilon(u1 in direction(), u2 in direction(), e in positive_epsilon()) {
        let spec = JointTestSpec::new(u1, u2, e);
        let left = sequential_joint_distribution(&spec);
        prop_assert_eq!(left, sequential_joint_distribution(&spec.with_order(Order::RightFirst)));
        prop_assert_eq!(left, joint_distribution_analytic(&u1, &u2, e));
    }

    #[test]
    fn singlet_marginals_are_half(u1 in direction(), u2 in direction(), e in positive_epsilon()) {
        let j = joint_distribution_analytic(&u1, &u2, e);
        let (l, r) = (j.left_marginal(), j.right_marginal());
        for p in [l.p_yes, l.p_no, r.p_yes, r.p_no] {
            prop_assert!((p - 0.5).abs() <= 1e-15);
        }
        let report = classify(&experiment_triple(&u1, &u2, e), Tolerance::default()).unwrap();
        prop_assert!(report.compatible);
    }

    #[test]
    fn interior_branch_reduces_to_quantum_table(u1 in direction(), u2 in direction()) {
        let j = joint_distribution_analytic(&u1, &u2, Epsilon::QUANTUM);
        let c = u1.dot(&u2);
        let half = c.clamp(-1.0, 1.0).acos() / 2.0;
        let s2 = 0.5 * half.sin().powi(2);
        let c2 = 0.5 * half.cos().powi(2);
        for (got, want) in j.to_array().iter().zip([s2, c2, c2, s2]) {
            prop_assert!((got - want).abs() <= 1e-9);
        }
    }

    #[test]
    fn aligned_and_opposite_settings(u in direction(), e in positive_epsilon()) {
        prop_assert_eq!(joint_distribution_analytic(&u, &u, e).to_array(), [0.0, 0.5, 0.5, 0.0]);
        prop_assert_eq!(joint_distribution_analytic(&u, &-u, e).to_array(), [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn singlet_separated_iff_orthogonal(u1 in direction(), u2 in direction(), e in positive_epsilon()) {
        let tol = Tolerance::default();
        let report = classify(&experiment_triple(&u1, &u2, e), tol).unwrap();
        // |p1 − ¼| = |c| / (4ε) inside the elastic, ¼ outside.
        let c = u1.dot(&u2);
        let residual = (c / (4.0 * e.value())).abs().min(0.25);
        if residual > 2.0 * tol.value() {
            prop_assert!(!report.separated);
        } else if residual < 0.5 * tol.value() {
            prop_assert!(report.separated);
        }
    }

    #[test]
    fn chsh_bounds(angles in prop::array::uniform4(0.0..=PI), e in 0.0..=1.0f64) {
        let r = chsh(&ChshSetup::coplanar(angles, Epsilon::new(e).unwrap()).unwrap());
        prop_assert!(r.s <= 4.0);
        let q = chsh(&ChshSetup::coplanar(angles, Epsilon::QUANTUM).unwrap());
        prop_assert!(q.s <= 2.0 * SQRT_2 + 1e-12);
    }

    #[test]
    fn correlation_two_routes(u1 in direction(), u2 in direction(), e in 0.0..=1.0f64) {
        let e = Epsilon::new(e).unwrap();
        let j = joint_distribution_analytic(&u1, &u2, e);
        let via_joint = (j.p1 + j.p4) - (j.p2 + j.p3);
        prop_assert!((correlation(&u1, &u2, e) - via_joint).abs() <= 1e-15);
    }
}

#[test]
fn canonical_chsh_follows_clamp_law() {
    for k in 0..=100 {
        let e = k as f64 / 100.0;
        let s = chsh(&ChshSetup::canonical(Epsilon::new(e).unwrap())).s;
        let law = if e <= SQRT_2 / 2.0 {
            4.0
        } else {
            (2.0 * SQRT_2 / e).min(4.0)
        };
        assert!((s - law).abs() < 1e-12, "eps={e}: {s} vs {law}");
    }
}

#[test]
fn scan_rows_follow_the_landscape() {
    let thetas = theta_grid(37);
    let rows = scan(&[0.0, 0.2, 0.6, 1.0], &thetas, Tolerance::default()).unwrap();
    let u1 = Direction::in_plane(0.0).unwrap();
    for r in rows {
        let c = u1.dot(&Direction::in_plane(r.theta).unwrap());
        if r.epsilon > 0.0 {
            assert!(r.compatible);
            assert_eq!(r.separated, r.theta == PI / 2.0, "{r:?}");
        } else {
            assert_eq!(r.compatible, c <= 0.0);
            assert_eq!(r.separated, c <= 0.0);
            assert!(r.classical_joint);
        }
        assert_eq!(r.correlation, (r.p1 + r.p4) - (r.p2 + r.p3));
    }
}
