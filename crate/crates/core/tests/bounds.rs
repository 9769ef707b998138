use drbgdisc::bounds::{
    ah_bound, ah_confidence, ah_constant, corollary1_bits, discrepancy_cost, evaluate, hnww_inverse_bound,
    security_advantage, theorem1_tail, threshold_constant, BoundQuery, Formula,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn ah_bound_increases_in_q_and_decreases_in_n(d in 1u32..50, n in 1u64..1_000_000, q1 in 0.0f64..0.999, q2 in 0.0f64..0.999) {
        prop_assume!(q1 < q2);
        prop_assert!(ah_bound(d, n, q1).unwrap() < ah_bound(d, n, q2).unwrap());
        prop_assert!(ah_bound(d, n + 1, q1).unwrap() < ah_bound(d, n, q1).unwrap());
    }

    #[test]
    fn confidence_inverts_the_bound(d in 1u32..50, n in 1u64..1_000_000, q in 1e-6f64..0.999) {
        let c = ah_bound(d, n, q).unwrap() / (d as f64 / n as f64).sqrt();
        prop_assert!((ah_confidence(d, n, c).unwrap() - q).abs() <= 1e-12);
    }

    #[test]
    fn bit_count_bounds_the_advantage(c in 1.01f64..1000.0, d in 1u32..40, n in 2u64..100_000) {
        let b = corollary1_bits(c, d, n).unwrap();
        let half = (n as f64).powf(d as f64 / 2.0);
        prop_assert!(security_advantage(c * c * half, b).unwrap() <= 1.0 + 1e-12);
        prop_assert!(security_advantage(half.max(1.0), b).unwrap() <= 1.0 / c * (1.0 + 1e-12));
        let t1 = theorem1_tail(d, n, 52, b, c).unwrap();
        prop_assert!(t1.components["security"] <= (n as f64).sqrt() / c * (1.0 + 1e-12));
    }

    #[test]
    fn security_term_is_the_advantage_at_the_discrepancy_cost(d in 1u32..20, n in 1u64..10_000, b in 0u32..512) {
        let r = theorem1_tail(d, n, 52, b, 13.0).unwrap();
        prop_assert_eq!(r.components["security"], security_advantage(discrepancy_cost(d, n), b).unwrap());
        prop_assert!(r.components["tail"] <= 1.0);
    }
}

#[test]
fn round_trip_grid() {
    let mut worst: f64 = 0.0;
    for d in 1..=10u32 {
        for n in [1u64, 3, 10, 32, 100, 317, 1000, 3162, 10_000, 100_000] {
            for k in 1..=10 {
                let q = k as f64 / 11.0;
                let c = ah_bound(d, n, q).unwrap() / (d as f64 / n as f64).sqrt();
                worst = worst.max((ah_confidence(d, n, c).unwrap() - q).abs());
            }
        }
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn published_constants() {
    assert_eq!((threshold_constant() * 1e4).trunc() / 1e4, 12.6174);
    assert_eq!(ah_constant(0.0), threshold_constant());
    assert_eq!(corollary1_bits(16.0, 10, 1024).unwrap(), 58);
    assert_eq!(hnww_inverse_bound(0.25, 5, 2.5287).unwrap(), 512);
    assert_eq!(security_advantage(2f64.powi(256), 256).unwrap(), 1.0);
}

#[test]
fn below_threshold_confidence_is_zero() {
    assert_eq!(ah_confidence(3, 100, 10.0).unwrap(), 0.0);
    let r = theorem1_tail(3, 100, 52, 256, 10.0).unwrap();
    assert!(r.vacuous);
    assert_eq!(r.components["tail"], 1.0);
}

#[test]
fn evaluate_dispatches_every_formula() {
    let q = BoundQuery { d: 5, n: 100, ..Default::default() };
    for f in ["ah", "theorem1", "corollary1", "hnww", "advantage"] {
        let formula: Formula = f.parse().unwrap();
        let r = evaluate(formula, &q).unwrap();
        assert!(r.bound_value.is_finite() && r.bound_value >= 0.0, "{f}");
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["formula"], f);
    }
}
