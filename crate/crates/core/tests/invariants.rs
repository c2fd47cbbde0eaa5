use proptest::prelude::*;
use regime_lab_core::*;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.05f64..8.0, 0.02f64..0.98).prop_map(|(s, rl)| ModelParams::new(s, rl).unwrap())
}

/// Params plus an `r_prime` in `(r_lower, r_tilde]`.
fn family_member() -> impl Strategy<Value = (ModelParams, f64)> {
    (params_strategy(), 1e-6f64..=1.0).prop_map(|(p, frac)| {
        let rl = p.r_lower();
        let rp = (rl + (max_policy(&p) - rl) * frac).min(max_policy(&p));
        (p, rp)
    })
}

proptest! {
    #[test]
    fn best_response_is_a_contraction(
        p in params_strategy(),
        r in 0.0f64..=1.0,
        a in -3.0f64..4.0,
        b in -3.0f64..4.0,
    ) {
        let fa = best_response_cutoff(&p, r, a).unwrap();
        let fb = best_response_cutoff(&p, r, b).unwrap();
        let modulus = 1.0 / (1.0 + 2.0 * p.sigma());
        prop_assert!((fa - fb).abs() <= (a - b).abs() * modulus + 1e-12);
    }

    #[test]
    fn attack_mass_is_monotone(
        p in params_strategy(),
        x in -5.0f64..5.0,
        t in -5.0f64..5.0,
        dx in 0.0f64..1.0,
        dt in 0.0f64..1.0,
    ) {
        let a = attack_mass(&p, x, t);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(attack_mass(&p, x, t + dt) <= a);
        prop_assert!(attack_mass(&p, x + dx, t) >= a);
    }

    #[test]
    fn iterated_dominance_agrees_with_closed_form(p in params_strategy(), r in 0.0f64..=1.0) {
        let closed = closed_form_thresholds(&p, r).unwrap();
        let (it, trace) = solve_iterated_dominance(&p, r, &SolverConfig::default()).unwrap();
        prop_assert!(trace.converged);
        prop_assert!((it.x_cutoff - closed.x_cutoff).abs() <= 1e-9);
        prop_assert!((it.theta_cutoff - closed.theta_cutoff).abs() <= 1e-9);
        prop_assert!(trace.upper_seq.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(trace.lower_seq.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn signaling_identities((p, rp) in family_member()) {
        let e = solve_signaling(&p, rp).unwrap();
        let tl = e.theta_lower();
        prop_assert_eq!(tl, p.cost(rp).unwrap());
        prop_assert!(tl > 0.0);
        prop_assert!(tl <= 1.0 - p.r_lower() + 1e-12);
        prop_assert!((e.aggregate_attack_no_intervention(e.theta_upper()) - tl).abs() <= 1e-12);
        prop_assert!((e.theta_no_attack() - e.no_attack_bound()).abs() <= 1e-12);
        prop_assert!(e.theta_upper() >= tl - 1e-12);
        prop_assert!(e.theta_no_attack() >= e.theta_upper());
    }

    #[test]
    fn welfare_is_continuous_at_kinks((p, rp) in family_member()) {
        let e = solve_signaling(&p, rp).unwrap();
        for k in [e.theta_lower(), e.theta_upper(), e.theta_no_attack()] {
            let jump = (e.ex_post_welfare(k) - e.ex_post_welfare(k.next_down())).abs();
            prop_assert!(jump <= 1e-12, "jump {} at {}", jump, k);
        }
    }

    #[test]
    fn attack_curve_equals_clamped_cutoff_line((p, rp) in family_member(), t in -3.0f64..20.0) {
        let e = solve_signaling(&p, rp).unwrap();
        let a = e.aggregate_attack_no_intervention(t);
        prop_assert!((a - attack_mass(&p, e.x_prime(), t)).abs() <= 1e-12);
        if e.classify_region(t) == PolicyRegion::DefendUnderAttackRegion {
            prop_assert!((e.ex_post_welfare(t) - (t - a)).abs() <= 1e-12);
        }
    }

    #[test]
    fn precise_noise_never_rewards_aggression(
        rl in 0.02f64..0.98,
        sigma_frac in 0.01f64..=1.0,
        rp_frac in 1e-6f64..=1.0,
        bump in 0.0f64..1.0,
        t in -1.0f64..12.0,
    ) {
        let probe = ModelParams::new(1.0, rl).unwrap();
        let p = ModelParams::new(critical_sigma(&probe) * sigma_frac, rl).unwrap();
        prop_assert!(!SigmaRegime::of(&p).is_noisy());
        let rp = (rl + (max_policy(&p) - rl) * rp_frac).min(max_policy(&p));
        let r_hi = rp + (max_policy(&p) - rp) * bump;
        let c = compare_welfare(&p, rp, r_hi, &[t], WELFARE_TOL).unwrap();
        prop_assert_ne!(c.verdicts[0], Verdict::HigherUnderAggressive);
    }

    #[test]
    fn simulation_is_reproducible(seed in any::<u64>(), t in -0.5f64..2.0) {
        let p = ModelParams::new(0.5, 0.2).unwrap();
        let cfg = SimConfig::new(500, 3, seed).unwrap().with_per_rep(true);
        let a = simulate_continuation(&p, 0.25, t, 1.0, &cfg).unwrap();
        let b = simulate_continuation(&p, 0.25, t, 1.0, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn noisy_noise_produces_a_crossing() {
    // narrow bands are picked up by probing breakpoints and their midpoints
    for (s, rl) in [(3.0, 0.2), (2.5, 0.2), (1.0, 0.5), (6.0, 0.1)] {
        let p = ModelParams::new(s, rl).unwrap();
        assert!(SigmaRegime::of(&p).is_noisy());
        let r_tilde = max_policy(&p);
        for k in 1..10 {
            let lo = rl + (r_tilde - rl) * k as f64 / 10.0;
            let hi = rl + (r_tilde - rl) * (k + 1) as f64 / 10.0;
            let a = solve_signaling(&p, lo).unwrap();
            let b = solve_signaling(&p, hi.min(r_tilde)).unwrap();
            let pos = 0.5 * (a.theta_upper().max(b.theta_upper()) + b.theta_no_attack());
            let neg = 0.5 * (a.theta_lower() + b.theta_lower());
            let c = compare_welfare(&p, lo, hi.min(r_tilde), &[neg, pos], WELFARE_TOL).unwrap();
            assert_eq!(
                c.verdicts,
                vec![
                    Verdict::LowerUnderAggressive,
                    Verdict::HigherUnderAggressive
                ],
                "s {s} rl {rl} k {k}"
            );
        }
    }
}

#[test]
fn parallel_schedule_does_not_change_results() {
    let p = ModelParams::new(3.0, 0.2).unwrap();
    let e = solve_signaling(&p, 0.8).unwrap();
    let cfg = SimConfig::new(10_000, 16, 77).unwrap();
    let baseline = simulate_signaling(&e, 5.0, &cfg).unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let serial = single.install(|| simulate_signaling(&e, 5.0, &cfg).unwrap());
    assert_eq!(baseline, serial);
}
