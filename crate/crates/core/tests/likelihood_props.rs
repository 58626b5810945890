mod common;

use approx::assert_abs_diff_eq;
use common::{fd_gradient, random_instance, random_theta, rel_err, Instance, OracleCov};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rem_core::likelihood::Evaluator;
use rem_core::{
    loglik_gradient, ordinal_loglik, rate_snapshot, temporal_loglik, Covariate, CovariateSet, EffectSpecification,
    Event, EventHistory, RemError, SufficientState, Timing,
};

fn instance(seed: u64) -> Instance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 5, 12, 5)
}

fn check_against_oracle(inst: &Instance, theta: &[f64], mode: Timing) -> Result<(), TestCaseError> {
    let h = inst.history(mode);
    let res = Evaluator::new(&h, &inst.spec(), &inst.cov.to_set(), mode)
        .unwrap()
        .evaluate(theta, false)
        .unwrap();
    let events: Vec<(f64, usize, usize)> = h.events().iter().map(|e| (e.time, e.sender, e.receiver)).collect();
    let (contrib, censor) = common::loglik(inst.n, &events, h.horizon(), &inst.effects, &inst.cov, theta, mode);
    for (a, b) in res.contributions.iter().zip(&contrib) {
        prop_assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{} vs {}", a, b);
    }
    let total = contrib.iter().sum::<f64>() + censor;
    prop_assert!((res.loglik - total).abs() < 1e-10 * total.abs().max(1.0));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn ordinal_matches_enumeration(seed in any::<u64>()) {
        let inst = instance(seed);
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 1.0);
        check_against_oracle(&inst, &theta, Timing::Ordinal)?;
    }

    #[test]
    fn exact_matches_closed_form(seed in any::<u64>()) {
        let inst = instance(seed);
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 1.0);
        check_against_oracle(&inst, &theta, Timing::Exact)?;
    }

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), exact in any::<bool>()) {
        let inst = instance(seed);
        let mode = if exact { Timing::Exact } else { Timing::Ordinal };
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 0.5);
        let eval = Evaluator::new(&inst.history(mode), &inst.spec(), &inst.cov.to_set(), mode).unwrap();
        let g = eval.evaluate(&theta, true).unwrap().gradient;
        let fd = fd_gradient(&theta, 1e-5, |t| eval.evaluate(t, false).unwrap().loglik);
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!(rel_err(*a, *b) < 1e-6, "analytic {} fd {}", a, b);
        }
    }

    #[test]
    fn probabilities_sum_to_one(seed in any::<u64>()) {
        let inst = instance(seed);
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 3.0);
        let spec = inst.spec();
        let cov = inst.cov.to_set();
        let mut state = SufficientState::new(inst.n);
        for &(t, s, r) in &inst.events {
            let snap = rate_snapshot(&state, &spec, &cov, &theta).unwrap();
            let p: f64 = snap.probabilities().iter().sum();
            prop_assert!((p - 1.0).abs() < 1e-12);
            prop_assert!(snap.total() > 0.0 && snap.total().is_finite());
            state.update(&Event::new(t, s, r));
        }
    }

    #[test]
    fn ordinal_shift_invariance(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut inst = instance(seed);
        inst.effects.retain(|e| *e != "CovSnd");
        inst.effects.insert(0, "CovSnd");
        inst.cov.snd = Some(vec![vec![1.0]; inst.n]);
        let h = inst.history(Timing::Ordinal);
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 1.0);
        let mut shifted = theta.clone();
        shifted[0] += c;
        let spec = inst.spec();
        let cov = inst.cov.to_set();
        let a = ordinal_loglik(&h, &spec, &cov, &theta).unwrap().loglik;
        let b = ordinal_loglik(&h, &spec, &cov, &shifted).unwrap().loglik;
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn exact_loglik_decreases_with_horizon(seed in any::<u64>(), extra in 0.01f64..5.0) {
        let inst = instance(seed);
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 1.0);
        let h = inst.history(Timing::Exact);
        let longer = EventHistory::new(inst.n, Timing::Exact, h.events().to_vec(), Some(inst.horizon + extra)).unwrap();
        let spec = inst.spec();
        let cov = inst.cov.to_set();
        let a = temporal_loglik(&h, &spec, &cov, &theta).unwrap().loglik;
        let b = temporal_loglik(&longer, &spec, &cov, &theta).unwrap().loglik;
        prop_assert!(b < a);
    }

    #[test]
    fn ordinal_residuals_nonnegative(seed in any::<u64>()) {
        let inst = instance(seed);
        let theta = random_theta(&mut ChaCha8Rng::seed_from_u64(!seed), inst.dim(), 2.0);
        let res = ordinal_loglik(&inst.history(Timing::Ordinal), &inst.spec(), &inst.cov.to_set(), &theta).unwrap();
        prop_assert!(res.residuals.iter().all(|&d| d >= 0.0));
        for (d, l) in res.residuals.iter().zip(&res.contributions) {
            prop_assert_eq!(*d, -2.0 * l);
        }
    }
}

#[test]
fn three_event_softmax_by_hand() {
    // n = 3, one CovSnd column x = (0, 1, 2), θ = 0.7.
    let x = [0.0, 1.0, 2.0];
    let theta = 0.7;
    let rows = [(1.0, 0, 1), (2.0, 2, 0), (3.0, 1, 2)];
    let h = EventHistory::new(3, Timing::Ordinal, rows.iter().map(|&(t, s, r)| Event::new(t, s, r)).collect(), None)
        .unwrap();
    let cov = CovariateSet::new().with("CovSnd", Covariate::actor_column(&x));
    let spec = EffectSpecification::parse(&["CovSnd"]).unwrap();
    let res = ordinal_loglik(&h, &spec, &cov, &[theta]).unwrap();
    // Each sender has two receivers, so the denominator is 2 Σ_s e^{θ x_s}.
    let z: f64 = 2.0 * x.iter().map(|v| (theta * v).exp()).sum::<f64>();
    let expected: f64 = rows.iter().map(|&(_, s, _)| (theta * x[s]).exp() / z).map(f64::ln).sum();
    assert_abs_diff_eq!(res.loglik, expected, epsilon = 1e-13);
}

#[test]
fn two_event_exact_by_hand() {
    // n = 2, PSAB-BA with θ = 1.5; events at 0.4 (0→1) and 1.0 (1→0), horizon 2.
    let h = EventHistory::new(2, Timing::Exact, vec![Event::new(0.4, 0, 1), Event::new(1.0, 1, 0)], Some(2.0)).unwrap();
    let spec = EffectSpecification::parse(&["PSAB-BA"]).unwrap();
    let th: f64 = 1.5;
    let res = temporal_loglik(&h, &spec, &CovariateSet::new(), &[th]).unwrap();
    // First instant: both hazards 1. Second: reply has e^θ, repeat has 1.
    // After the reply (1→0), 0→1 is the AB-BA shift again.
    let l1 = 0.0 - 0.4 * 2.0;
    let l2 = th - 0.6 * (1.0 + th.exp());
    let cens = -1.0 * (1.0 + th.exp());
    assert_abs_diff_eq!(res.contributions[0], l1, epsilon = 1e-14);
    assert_abs_diff_eq!(res.contributions[1], l2, epsilon = 1e-14);
    assert_abs_diff_eq!(res.censoring.unwrap(), cens, epsilon = 1e-14);
    assert_abs_diff_eq!(res.loglik, l1 + l2 + cens, epsilon = 1e-13);
}

#[test]
fn zero_theta_gradient_is_observed_minus_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut inst = random_instance(&mut rng, 5, 12, 4);
    inst.effects = vec!["CovSnd", "CovRec"];
    inst.cov = OracleCov {
        snd: Some((0..inst.n).map(|i| vec![i as f64 * 0.5]).collect()),
        rec: Some((0..inst.n).map(|i| vec![(i % 2) as f64]).collect()),
        ..Default::default()
    };
    let h = inst.history(Timing::Ordinal);
    let g = loglik_gradient(&h, &inst.spec(), &inst.cov.to_set(), &[0.0, 0.0], Timing::Ordinal).unwrap();
    let support = common::dyads(inst.n);
    let nn = support.len() as f64;
    let mut expected = [0.0, 0.0];
    for &(_, s, r) in &inst.events {
        let obs = common::statistics(inst.n, &[], &inst.effects, &inst.cov, s, r);
        for j in 0..2 {
            let mean: f64 = support
                .iter()
                .map(|&(a, b)| common::statistics(inst.n, &[], &inst.effects, &inst.cov, a, b)[j])
                .sum::<f64>()
                / nn;
            expected[j] += obs[j] - mean;
        }
    }
    assert_abs_diff_eq!(g[0], expected[0], epsilon = 1e-12);
    assert_abs_diff_eq!(g[1], expected[1], epsilon = 1e-12);
}

#[test]
fn non_finite_theta_rejected() {
    let h = EventHistory::new(3, Timing::Ordinal, vec![Event::new(1.0, 0, 1)], None).unwrap();
    let spec = EffectSpecification::parse(&["PSAB-BA"]).unwrap();
    let r = ordinal_loglik(&h, &spec, &CovariateSet::new(), &[f64::NAN]);
    assert!(matches!(r, Err(RemError::Parameter(_))));
    let r = ordinal_loglik(&h, &spec, &CovariateSet::new(), &[0.0, 1.0]);
    assert!(matches!(r, Err(RemError::Parameter(_))));
}

#[test]
fn large_coefficients_stay_finite() {
    let h = EventHistory::new(
        4,
        Timing::Ordinal,
        vec![Event::new(1.0, 0, 1), Event::new(2.0, 1, 0), Event::new(3.0, 0, 1)],
        None,
    )
    .unwrap();
    let spec = EffectSpecification::parse(&["PSAB-BA"]).unwrap();
    let res = ordinal_loglik(&h, &spec, &CovariateSet::new(), &[700.0]).unwrap();
    assert!(res.loglik.is_finite());
    assert!(res.gradient.iter().all(|g| g.is_finite()));
}
