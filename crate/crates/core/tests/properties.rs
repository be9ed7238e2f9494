use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rotbound::bounds::{eval_am, eval_kmm, eval_new};
use rotbound::constants::{c_crit, PaperConstants};
use rotbound::optimizer::{am_comparison_points, truncation_check};
use rotbound::scalar::{step_cost, step_for_cost, UNIT_PREIMAGE};
use rotbound::{apply_w, max_w, t_closed, ParamSeq};

fn params(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0 / PI, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn recursion_matches_closed_form(v in params(8)) {
        let seq = ParamSeq::new(v).unwrap();
        assert_abs_diff_eq!(apply_w(&seq).last(), max_w(&seq), epsilon = 1e-14);
    }

    #[test]
    fn permutation_invariant(v in params(6), rot in 0usize..6) {
        let mut w = v.clone();
        w.rotate_left(rot % v.len());
        w.reverse();
        let a = max_w(&ParamSeq::new(v).unwrap());
        let b = max_w(&ParamSeq::new(w).unwrap());
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }

    #[test]
    fn partition_is_increasing_below_half(v in params(8)) {
        let part = apply_w(&ParamSeq::new(v).unwrap());
        prop_assert_eq!(part.points()[0], 0.0);
        prop_assert!(part.points().windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(part.last() < 0.5);
    }

    #[test]
    fn step_cost_inverts(x in 0.0..=1.0 / PI) {
        let back = step_for_cost(step_cost(x).unwrap()).unwrap();
        assert_abs_diff_eq!(back, x, epsilon = 1e-14);
    }

    #[test]
    fn no_sequence_beats_t(v in params(5)) {
        let c = PaperConstants::solved();
        let seq = ParamSeq::new(v).unwrap();
        let theta = seq.total_cost();
        prop_assume!(theta <= FRAC_PI_2);
        let t = t_closed(theta, c.vartheta).unwrap().value;
        prop_assert!(max_w(&seq) <= t + 1e-12, "{} > {}", max_w(&seq), t);
    }

    #[test]
    fn new_bound_monotone_and_dominant(a in 0.0..0.4548, b in 0.0..0.4548) {
        let c = PaperConstants::solved();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(eval_new(lo, c.kappa).unwrap() < eval_new(hi, c.kappa).unwrap());
        let n = eval_new(hi, c.kappa).unwrap();
        // The older bounds have smaller domains.
        for older in [eval_kmm(hi), eval_am(hi)].into_iter().flatten() {
            prop_assert!(n <= older + 1e-12);
        }
    }

    #[test]
    fn t_inverts_n(theta in 0.0..=FRAC_PI_2) {
        let c = PaperConstants::solved();
        let x = t_closed(theta, c.vartheta).unwrap().value;
        assert_abs_diff_eq!(eval_new(x, c.kappa).unwrap(), theta, epsilon = 1e-9);
    }
}

#[test]
fn bound_reaches_right_angle_at_critical_ratio() {
    let c = PaperConstants::solved();
    assert_abs_diff_eq!(eval_new(c_crit(), c.kappa).unwrap(), FRAC_PI_2, epsilon = 1e-12);
    assert!(eval_new(c_crit() + 1e-6, c.kappa).is_err());
}

#[test]
fn am_comparison_sequences_hit_x() {
    let c = PaperConstants::solved();
    for i in 1..=50 {
        let x = UNIT_PREIMAGE + (c.c_star - UNIT_PREIMAGE) * i as f64 / 50.0;
        let (lambda, value) = am_comparison_points(x).unwrap();
        assert_abs_diff_eq!(value, x, epsilon = 1e-10);
        assert!(x < t_closed(eval_am(x).unwrap(), c.vartheta).unwrap().value);
        assert!(lambda.len() == 2 || lambda.len() == 3);
    }
    assert!(am_comparison_points(UNIT_PREIMAGE).is_err());
}

#[test]
fn optimal_sequences_are_truncation_stable() {
    let c = PaperConstants::solved();
    for theta in [0.3, 0.8, 1.0, 1.2, FRAC_PI_2] {
        let opt = t_closed(theta, c.vartheta).unwrap();
        let report = truncation_check(&opt.argmax, 300, 1e-5).unwrap();
        assert!(report.passed, "θ={theta}: {report:?}");
    }
}
