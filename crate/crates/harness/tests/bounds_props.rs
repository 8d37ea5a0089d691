use mql_harness::bounds::{
    dyadic_grid, exact_lower_t, invert_query_bound, lower_bound_guard, lower_eps_log2, sweep,
    theoretical_bounds, Regime, DEFAULT_C,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn lower_eps_decreases_in_horizon(k in 2usize..200, t in 1usize..60) {
        prop_assert!(lower_eps_log2(k, t + 1) < lower_eps_log2(k, t));
    }

    #[test]
    fn lower_eps_decreases_in_k(k in 2usize..200, t in 1usize..60) {
        prop_assert!(lower_eps_log2(k + 1, t) < lower_eps_log2(k, t));
    }

    #[test]
    fn upper_never_exceeds_k(k in 2usize..200, e in -40i32..0) {
        let b = theoretical_bounds(k, 2f64.powi(e), DEFAULT_C).unwrap();
        prop_assert!(b.upper_t <= k as f64);
        prop_assert!(b.lower_t <= b.upper_t);
        prop_assert!(b.lower_t <= k as f64 / 2.0 - 1.0 + 1e-12 || b.lower_t == 0.0);
    }

    #[test]
    fn invert_is_decreasing_in_eps(j in 1u32..200) {
        // a = 1, b = 4: every eps below 1/e keeps the Lambert step valid.
        let e1 = (-(j as f64)).exp() / std::f64::consts::E;
        let e2 = e1 / 2.0;
        prop_assert!(invert_query_bound(1.0, 4.0, e2).unwrap() >= invert_query_bound(1.0, 4.0, e1).unwrap());
    }
}

#[test]
fn sweep_k32_has_twenty_monotone_rows() {
    let rows = sweep(32, &dyadic_grid(20), DEFAULT_C).unwrap();
    assert_eq!(rows.len(), 20);
    for w in rows.windows(2) {
        assert!(w[1].upper_t >= w[0].upper_t);
    }
    assert_eq!(rows.last().unwrap().upper_t, 32.0);
}

#[test]
fn regimes_follow_the_guards() {
    let k = 8;
    assert_eq!(
        theoretical_bounds(k, 0.9, DEFAULT_C).unwrap().regime,
        Regime::ZeroQuery
    );
    assert_eq!(
        theoretical_bounds(k, 0.6, DEFAULT_C).unwrap().regime,
        Regime::TwoQuery
    );
    assert_eq!(
        theoretical_bounds(k, 0.1, DEFAULT_C).unwrap().regime,
        Regime::Intermediate
    );
    let g = lower_bound_guard(k);
    assert_eq!(
        theoretical_bounds(k, g, DEFAULT_C).unwrap().regime,
        Regime::LowerBound
    );
    assert!(theoretical_bounds(k, 0.0, DEFAULT_C).is_err());
    assert!(theoretical_bounds(k, -1.0, DEFAULT_C).is_err());
}

#[test]
fn zero_query_regime_needs_nothing() {
    for k in [2, 5, 16, 64] {
        let b = theoretical_bounds(k, 1.0 - 1.0 / k as f64, DEFAULT_C).unwrap();
        assert_eq!((b.upper_t, b.lower_t), (0.0, 0.0));
    }
}

#[test]
fn exact_lower_is_half_k_minus_one() {
    assert_eq!(exact_lower_t(2), 0);
    assert_eq!(exact_lower_t(3), 1);
    assert_eq!(exact_lower_t(16), 7);
    assert_eq!(exact_lower_t(17), 8);
}

#[test]
fn k16_eps_tenth_is_capped() {
    let b = theoretical_bounds(16, 0.1, 8.0).unwrap();
    assert_eq!(b.upper_t, 16.0);
}
