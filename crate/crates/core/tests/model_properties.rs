use predfront_core::{
    lambda_threshold, limit_iteration, mu_upper_bound, spreading_limits, ModelParams, Profile, Regime,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn weak_params() -> impl Strategy<Value = ModelParams> {
    (0.05f64..5.0, 0.1f64..10.0, 0.01f64..0.99, 0.01f64..0.99).prop_map(|(a, b, cb, q)| {
        // c below b and below 1/a
        let c = (cb * b).min(q / a);
        ModelParams::new(a, b, c, 1.0, 1.0, 1.0).unwrap()
    })
}

proptest! {
    #[test]
    fn lambda_decreases_in_a_and_b(a in 0.01f64..20.0, b in 0.01f64..20.0) {
        let p = ModelParams::new(a, b, 1.0, 1.0, 1.0, 1.0).unwrap();
        let l = lambda_threshold(&p);
        prop_assert!((l - PI / (1.0 + a * b).sqrt()).abs() <= 1e-14 * l);
        let da = ModelParams { a: a * (1.0 + 1e-6), ..p };
        let db = ModelParams { b: b * (1.0 + 1e-6), ..p };
        prop_assert!(lambda_threshold(&da) < l);
        prop_assert!(lambda_threshold(&db) < l);
    }

    #[test]
    fn regime_depends_only_on_abc(a in 0.01f64..5.0, b in 0.01f64..5.0, c in 0.01f64..5.0,
                                   d in 0.01f64..5.0, mu in 0.01f64..5.0, h0 in 0.01f64..5.0) {
        let p = ModelParams::new(a, b, c, d, mu, h0).unwrap();
        let q = ModelParams::new(a, b, c, 1.0, 1.0, 1.0).unwrap();
        prop_assert_eq!(p.regime(), q.regime());
        let expect = if b <= c { Regime::Strong } else if a * c < 1.0 { Regime::Weak } else { Regime::Uncovered };
        prop_assert_eq!(p.regime(), expect);
    }

    #[test]
    fn iterates_are_nested_and_converge(p in weak_params()) {
        let q = p.a * p.c;
        let rounds = (60.0 / -q.log10()).ceil() as usize;
        let it = limit_iteration(&p, rounds.max(2)).unwrap();
        let (us, vs) = spreading_limits(&p).unwrap();
        let slack = 1e-12 * us.max(1.0);
        for i in 0..it.rounds() {
            prop_assert!(it.under_u[i] <= it.over_u[i] + slack);
            prop_assert!(it.under_v[i] <= it.over_v[i] + slack);
            prop_assert!(it.under_u[i] <= it.under_u[i + 1] + slack);
            prop_assert!(it.under_u[i + 1] <= us + slack);
            prop_assert!(us <= it.over_u[i] + slack);
            if i + 1 < it.rounds() {
                prop_assert!(it.over_u[i + 1] <= it.over_u[i] + slack);
            }
        }
        let n = it.rounds() - 1;
        prop_assert!((it.under_u[n + 1] - us).abs() <= 1e-12 * us);
        prop_assert!((it.over_u[n] - us).abs() <= 1e-12 * us);
        prop_assert!((it.over_v[n] - vs).abs() <= 1e-12 * us);
        prop_assert!((it.under_v[n] - vs).abs() <= 1e-12 * us);
    }

    #[test]
    fn mu_upper_bound_scale_invariance(h0 in 0.05f64..0.7, amp in 1.0f64..4.0, s in 1.0f64..8.0) {
        let p = ModelParams::new(1.0, 1.0, 0.5, 1.0, 1.0, h0).unwrap();
        let u = Profile::Quartic { amplitude: amp }.sample(h0, 801).unwrap();
        let m1 = mu_upper_bound(&p, &u).unwrap();
        let m2 = mu_upper_bound(&p, &u.scaled(s)).unwrap();
        prop_assert!((m1 - m2).abs() <= 1e-12 * m1);
    }
}

#[test]
fn gap_shrinks_by_q_squared_each_round() {
    let p = ModelParams::new(0.8, 2.5, 0.9, 1.0, 1.0, 1.0).unwrap();
    let it = limit_iteration(&p, 30).unwrap();
    let q = p.a * p.c;
    let a = p.b - p.c;
    for i in 0..it.rounds() {
        let gap = it.over_v[i] - it.under_v[i];
        let expect = a * q.powi(2 * i as i32 + 1);
        assert!((gap - expect).abs() <= 1e-12 * a, "round {i}: {gap} vs {expect}");
    }
}
