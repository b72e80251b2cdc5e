mod common;

use common::*;
use persuasion_poa::certify::*;
use persuasion_poa::equilibria::*;
use persuasion_poa::model::*;
use persuasion_poa::Error;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn equilibrium(n: usize, zeta: f64, grid: usize) -> (Instance, StrategyProfile) {
    let spec = BernoulliEqSpec::new(n, zeta).unwrap();
    let inst = spec.instance().unwrap();
    let scheme = bernoulli_equilibrium_scheme(spec, grid).unwrap();
    let prof = StrategyProfile::symmetric(&inst, scheme).unwrap();
    (inst, prof)
}

fn cuts_by_hand(e_cut: f64, q: Vec<f64>, e: Vec<f64>, k: usize) -> QuantileCutResult {
    let sw_prime = e_cut * k as f64 + e.iter().zip(&q).map(|(e, q)| e * q).sum::<f64>();
    QuantileCutResult { e_cut, q, e, sw_prime, repaired: false }
}

fn uniform_pair() -> Instance {
    let p = Prior::new([(0.25, 0.5), (0.75, 0.5)]).unwrap();
    Instance::symmetric(p, UtilityFn::constant(1.0).unwrap(), 2, 1).unwrap()
}

#[test]
fn quantile_cut_examples() {
    let cuts = quantile_cuts(&uniform_pair());
    assert!(close(cuts.e_cut, 0.75, 1e-12));
    assert!(close(cuts.q[0], 0.5, 1e-12) && close(cuts.q[1], 0.5, 1e-12));
    assert!(cuts.e.iter().all(|&e| close(e, 0.75, 1e-12)));
    assert!(close(sw_prime_upper(&cuts), 1.5, 1e-12));
    assert!(!cuts.repaired);

    let det = Instance::new(vec![Prior::point(0.6).unwrap()], vec![UtilityFn::identity()], 1).unwrap();
    let cuts = quantile_cuts(&det);
    assert!(close(cuts.e_cut, 0.6, 1e-12) && cuts.q == vec![1.0]);
    assert!(close(sw_prime_upper(&cuts), 1.2, 1e-12));

    let all = Instance::new(
        vec![bernoulli(0.3), Prior::new([(0.2, 0.5), (0.6, 0.5)]).unwrap()],
        vec![UtilityFn::identity(); 2],
        2,
    )
    .unwrap();
    let cuts = quantile_cuts(&all);
    assert_eq!(cuts.q, vec![1.0, 1.0]);
    assert!(close(cuts.e[0], 0.3, 1e-12) && close(cuts.e[1], 0.4, 1e-12));
    assert!(close(cuts.e_cut, 0.3, 1e-9));
}

#[test]
fn point_mass_repair() {
    let inst = Instance::new(
        vec![Prior::point(1.0).unwrap(), bernoulli(0.5)],
        vec![UtilityFn::constant(1.0).unwrap(); 2],
        1,
    )
    .unwrap();
    let cuts = quantile_cuts(&inst);
    assert!(cuts.repaired);
    assert_eq!(cuts.e_cut, 1.0);
    assert_eq!(cuts.q.iter().sum::<f64>(), 1.0);
    // The lower-indexed agent absorbs the reduction.
    assert_eq!(cuts.q, vec![0.5, 0.5]);
    assert!(cuts.sw_prime >= first_best(&inst, EvalMode::Exact).unwrap().value);
}

#[test]
fn classification_examples() {
    let params = golden_parameters();
    let (inst, prof) = equilibrium(2, 0.5, 40);
    let cuts = quantile_cuts(&inst);
    assert!(close(cuts.q[0], 0.5, 1e-12));
    let c = classify_agents(&inst, &prof, &cuts, &params).unwrap();
    assert_eq!(c.n2, vec![0, 1]);
    assert!(c.r.iter().all(|&r| close(r, 0.5, 1e-12)));

    let all = Instance::bernoulli(3, 0.4, 3).unwrap();
    let prof = StrategyProfile::pooling(&all);
    let c = classify_agents(&all, &prof, &quantile_cuts(&all), &params).unwrap();
    assert!(c.n1.is_empty());
    assert_eq!(c.n2.len(), 3);

    // Agents with a tail mean above the cut are never in the first group.
    let mut r = rng(3);
    for _ in 0..50 {
        let inst = random_instance(&mut r, 4, 3, 2);
        let prof = random_profile(&mut r, &inst, 3);
        let cuts = quantile_cuts(&inst);
        let c = classify_agents(&inst, &prof, &cuts, &params).unwrap();
        for i in 0..inst.n() {
            if cuts.e[i] > cuts.e_cut + 1e-12 {
                assert!(c.n2.contains(&i));
            }
        }
    }
}

#[test]
fn contribution_examples() {
    let (inst, prof) = equilibrium(2, 0.5, 400);
    for c in contributions(&inst, &prof) {
        assert!(close(c, 1.0 / 3.0, 1e-3));
    }
    let all = Instance::new(
        vec![bernoulli(0.3), Prior::new([(0.2, 0.5), (0.6, 0.5)]).unwrap()],
        vec![UtilityFn::identity(); 2],
        2,
    )
    .unwrap();
    let c = contributions(&all, &StrategyProfile::full_revelation(&all));
    assert!(close(c[0], 0.3, 1e-15) && close(c[1], 0.4, 1e-15));

    let loser = Instance::new(
        vec![Prior::new([(0.1, 0.5), (0.3, 0.5)]).unwrap(), Prior::point(0.9).unwrap()],
        vec![UtilityFn::identity(); 2],
        1,
    )
    .unwrap();
    assert_eq!(contributions(&loser, &StrategyProfile::full_revelation(&loser))[0], 0.0);
}

fn loser_instance(opponent: f64) -> Instance {
    Instance::new(
        vec![Prior::new([(0.2, 0.5), (0.4, 0.5)]).unwrap(), Prior::point(opponent).unwrap(), Prior::point(opponent).unwrap()],
        vec![UtilityFn::constant(1.0).unwrap(); 3],
        1,
    )
    .unwrap()
}

#[test]
fn deviation_signal_pools_everything_when_every_signal_loses() {
    let inst = loser_instance(0.9);
    let prof = StrategyProfile::full_revelation(&inst);
    let params = golden_parameters();
    let cuts = cuts_by_hand(0.9, vec![0.5, 0.25, 0.25], vec![0.9, 0.9, 0.9], 1);
    let dev = construct_deviation_signal(&inst, &prof, 0, &cuts, &params).unwrap();
    assert_eq!(dev.top_fraction, 1.0);
    assert_eq!(dev.low_signals, vec![0, 1]);
    assert!(!dev.degenerate);
    assert!(close(dev.s_star_mean, 0.3, 1e-15) && close(dev.s_star_mass, 1.0, 1e-15));
    assert!(validate_scheme(inst.prior(0), &dev.draft()).is_valid());
    let a = deviation_analysis(&inst, &prof, &dev);
    assert_eq!(a.gain, 0.0);
    assert!(!a.profitable && a.s_star_win == 0.0);
}

#[test]
fn deviation_signal_degenerates_when_every_signal_wins() {
    let inst = loser_instance(0.1);
    let prof = StrategyProfile::full_revelation(&inst);
    let params = golden_parameters();
    let cuts = cuts_by_hand(0.1, vec![1.0, 0.0, 0.0], vec![10.0, 0.1, 0.1], 1);
    let dev = construct_deviation_signal(&inst, &prof, 0, &cuts, &params).unwrap();
    assert!(dev.low_signals.is_empty());
    assert!(dev.degenerate && dev.s_star_mass == 0.0);
    assert_eq!(deviation_analysis(&inst, &prof, &dev).gain, 0.0);

    let honest = cuts_by_hand(0.1, vec![1.0, 0.0, 0.0], vec![0.3, 0.1, 0.1], 1);
    assert!(matches!(
        construct_deviation_signal(&inst, &prof, 0, &honest, &params),
        Err(Error::NotSmallContributor { agent: 0 })
    ));
}

#[test]
fn deviation_changes_nothing_when_everyone_is_selected() {
    let inst = Instance::bernoulli(2, 0.5, 2).unwrap();
    let prof = StrategyProfile::full_revelation(&inst);
    let cuts = cuts_by_hand(0.5, vec![1.0, 1.0], vec![5.0, 5.0], 2);
    let dev = construct_deviation_signal(&inst, &prof, 0, &cuts, &golden_parameters()).unwrap();
    assert_eq!(deviation_analysis(&inst, &prof, &dev).gain, 0.0);
}

#[test]
fn certify_the_two_agent_equilibrium() {
    let (inst, prof) = equilibrium(2, 0.5, 400);
    let cert = certify_poa(&inst, &prof, golden_parameters(), EvalMode::Exact).unwrap();
    assert!(!cert.is_witness());
    assert!(close(cert.measured_ratio, 1.125, 1e-3), "{}", cert.measured_ratio);
    assert!(cert.bound().unwrap() <= 22.181);
    assert!(cert.sw_prime_ratio <= cert.overall_bound);
    assert!(close(cert.overall_bound, golden_bound(), 1e-6));
}

#[test]
fn certify_when_everyone_is_selected() {
    let mut r = rng(11);
    for _ in 0..20 {
        let n = 1 + (seed_of(&mut r) % 4) as usize;
        let priors = (0..n).map(|_| random_prior(&mut r, 3, 0, None)).collect();
        let inst = Instance::new(priors, (0..n).map(|_| random_utility(&mut r)).collect(), n).unwrap();
        let prof = random_profile(&mut r, &inst, 3);
        let cert = certify_poa(&inst, &prof, golden_parameters(), EvalMode::Exact).unwrap();
        assert!(matches!(cert.case, CertificateCase::Case1 { .. }));
        assert!(close(cert.measured_ratio, 1.0, 1e-12));
        assert!(cert.sw_prime_ratio <= 2.0 + 1e-12);
    }
}

#[test]
fn full_revelation_with_identical_bernoulli_agents() {
    // Revealing is not an equilibrium once N ≥ 3, which regret detects
    // directly. With two agents pooling and revealing tie.
    for n in [3, 5] {
        let inst = Instance::bernoulli(n, 1.0 / n as f64, 1).unwrap();
        let prof = StrategyProfile::full_revelation(&inst);
        let report = verify_epsilon_ne(&inst, &prof, DiscretizationSpec::new(1.0 / n as f64).unwrap(), 1e-6).unwrap();
        assert!(!report.is_epsilon_ne);
        let cert = certify_poa(&inst, &prof, golden_parameters(), EvalMode::Exact).unwrap();
        // Every agent contributes its full share, so no small contributor
        // exists and the first case applies.
        assert!(matches!(cert.case, CertificateCase::Case1 { .. }), "{n}: {:?}", cert.case);
        let cuts = quantile_cuts(&inst);
        assert!(matches!(
            construct_deviation_signal(&inst, &prof, 0, &cuts, &golden_parameters()),
            Err(Error::NotSmallContributor { .. })
        ));
    }
}

#[test]
fn witness_on_a_non_equilibrium_profile() {
    // Agent 0 reveals everything against a strong pooled opponent: its
    // high values are buried in the low-win signal, and pooling them pays.
    let inst = Instance::new(
        vec![Prior::new([(0.0, 0.7), (1.0, 0.3)]).unwrap(), Prior::point(0.5).unwrap()],
        vec![UtilityFn::constant(1.0).unwrap(); 2],
        1,
    )
    .unwrap();
    let scheme = SignalingScheme::from_allocations(inst.prior(0), vec![vec![0.7, 0.0], vec![0.0, 0.3]]).unwrap();
    let prof = StrategyProfile::new(&inst, vec![scheme, SignalingScheme::pooling(inst.prior(1))]).unwrap();
    let cert = certify_poa(&inst, &prof, golden_parameters(), EvalMode::Exact).unwrap();
    if let CertificateCase::DeviationWitness { i_star, scheme, gain } = &cert.case {
        assert!(*gain > 0.0);
        assert!(validate_scheme(inst.prior(*i_star), scheme).is_valid());
        let dev = SignalingScheme::from_draft(inst.prior(*i_star), scheme).unwrap();
        let before = expected_utility(&inst, &prof, *i_star);
        let after = expected_utility(&inst, &prof.with_scheme(*i_star, dev), *i_star);
        assert!(close(after - before, *gain, 1e-12));
    } else {
        // Otherwise the certificate must still be sound.
        assert!(cert.sw_prime_ratio <= cert.overall_bound + 1e-9);
    }
}

#[test]
fn warmup_examples() {
    for (n, zeta) in [(2, 0.5), (3, 0.3), (5, 0.2), (10, 0.05)] {
        let (inst, prof) = equilibrium(n, zeta, 400);
        let w = warmup_certify(&inst, &prof).unwrap();
        let nf = n as f64;
        let expected = (2.0 - 1.0 / nf) * (1.0 - (1.0 - zeta).powi(n as i32)) / (nf * zeta);
        assert!(close(w.measured_ratio, expected, 2e-3), "{} vs {expected}", w.measured_ratio);
        assert!(w.measured_ratio <= 4.0);
        assert!(w.bound_ratio >= w.measured_ratio - 1e-12);
    }
    for n in 3..=8 {
        let inst = Instance::bernoulli(n, 1.0 / n as f64, 1).unwrap();
        let w = warmup_certify(&inst, &StrategyProfile::pooling(&inst)).unwrap();
        match w.outcome {
            WarmupOutcome::DeviationWitness { gain_direct, gain_formula, gain_lower_bound, profitable, r_i_star, .. } => {
                assert!(profitable && gain_direct > 0.0);
                assert!(close(gain_direct, gain_formula, 1e-12));
                assert!(gain_lower_bound <= gain_direct + 1e-12);
                assert!(close(r_i_star, 1.0 / n as f64, 1e-12));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }
    // With two agents the binary top-2/N scheme is pooling itself.
    let two = Instance::bernoulli(2, 0.5, 1).unwrap();
    let w = warmup_certify(&two, &StrategyProfile::pooling(&two)).unwrap();
    assert_eq!(w.outcome, WarmupOutcome::TailCheckPassed);

    let single = Instance::bernoulli(1, 0.3, 1).unwrap();
    let w = warmup_certify(&single, &StrategyProfile::pooling(&single)).unwrap();
    assert!(close(w.measured_ratio, 1.0, 1e-15));

    assert!(matches!(warmup_certify(&Instance::bernoulli(3, 0.3, 2).unwrap(), &StrategyProfile::pooling(&Instance::bernoulli(3, 0.3, 2).unwrap())), Err(Error::WrongRegime(_))));
}

#[test]
fn discretized_examples() {
    let single = Instance::new(vec![Prior::new([(0.1, 0.5), (0.9, 0.5)]).unwrap()], vec![UtilityFn::identity()], 1).unwrap();
    let cuts = cuts_by_hand(0.5, vec![0.37], vec![0.9], 1);
    let t = cuts.truncated(&single, 0.1);
    assert!(close(t.q[0], 0.3, 1e-12));
    assert!(close(t.e[0], 0.9, 1e-12));

    let (inst, prof) = equilibrium(2, 0.5, 10);
    let spec = DiscretizationSpec::new(0.1).unwrap();
    assert!(matches!(
        discretized_certify(&inst, &prof, golden_parameters(), spec, EvalMode::Exact),
        Err(Error::SpecViolation(_))
    ));
    let p = grid_game_parameters();
    assert!(close(p.overall_bound(), 22.459, 1e-3));
    let small = DiscretizationSpec::new(0.01).unwrap();
    let (inst, _) = equilibrium(2, 0.5, 10);
    let cells = grain_aligned_boundaries(BernoulliEqSpec::new(2, 0.5).unwrap(), 0.01).unwrap();
    let scheme = bernoulli_equilibrium_scheme_on_cells(BernoulliEqSpec::new(2, 0.5).unwrap(), &cells).unwrap();
    let prof = StrategyProfile::symmetric(&inst, scheme).unwrap();
    let cert = discretized_certify(&inst, &prof, p, small, EvalMode::Exact).unwrap();
    assert!(!cert.is_witness());
    assert!(close(cert.overall_bound, p.discretized_case1_bound(0.01, 2).max(p.case2_bound()), 1e-12));
    assert!(cert.sw_prime_ratio <= cert.overall_bound);
}

#[test]
fn parameter_sets() {
    let g = golden_parameters();
    assert!(g.alpha > 1.0 && g.tau < 1.0 && g.beta < g.tau && g.phi * g.tau > g.alpha);
    assert!(close(g.case1_bound(), 22.181, 1e-3));
    assert!(close(g.case2_bound(), 22.181, 1e-3));
    assert!(close(golden_bound(), 11.0 + 5.0 * 5f64.sqrt(), 1e-15));
    assert!(matches!(CertParams::new(2.0, 0.1, 0.5, 3.0), Err(Error::SpecViolation(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn quantile_cut_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 5, 4, 3);
        let cuts = quantile_cuts(&inst);
        prop_assert!((cuts.q.iter().sum::<f64>() - inst.k() as f64).abs() <= 1e-9);
        for i in 0..inst.n() {
            prop_assert!(cuts.e[i] >= cuts.e_cut - 1e-12);
            if cuts.e[i] > cuts.e_cut + 1e-12 {
                prop_assert!(cuts.q[i] == 1.0);
            }
            if cuts.q[i] == 0.0 {
                prop_assert!(cuts.e[i] == cuts.e_cut);
            }
            // The sweep is monotone: raising the threshold never grows a quantile.
            let p = inst.prior(i);
            prop_assert!(p.quantile_cut(cuts.e_cut + 0.05) <= p.quantile_cut(cuts.e_cut) + 1e-12);
        }
        let sw = cuts.e_cut * inst.k() as f64 + cuts.e.iter().zip(&cuts.q).map(|(e, q)| e * q).sum::<f64>();
        prop_assert!((sw - sw_prime_upper(&cuts)).abs() <= 1e-12);
        prop_assert!(sw_prime_upper(&cuts) >= oracle_first_best(&inst) - 1e-9);
    }

    #[test]
    fn repair_keeps_the_budget(support in 1usize..3, n in 2usize..5, k_raw in 1usize..4) {
        // Identical top atoms force the jump across k.
        let k = k_raw.min(n);
        let prior = if support == 1 { Prior::point(0.8).unwrap() } else { Prior::new([(0.2, 0.5), (0.8, 0.5)]).unwrap() };
        let inst = Instance::symmetric(prior, UtilityFn::identity(), n, k).unwrap();
        let cuts = quantile_cuts(&inst);
        prop_assert!((cuts.q.iter().sum::<f64>() - k as f64).abs() <= 1e-9);
        prop_assert!(cuts.sw_prime >= oracle_first_best(&inst) - 1e-9);
    }

    #[test]
    fn small_contributor_floor(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 4, 4, 2);
        let prof = random_profile(&mut r, &inst, 4);
        let params = golden_parameters();
        let cuts = quantile_cuts(&inst);
        let c = contributions(&inst, &prof);
        for i in 0..inst.n() {
            if !(c[i] < cuts.e[i] * params.beta * cuts.q[i]) {
                continue;
            }
            let dev = construct_deviation_signal(&inst, &prof, i, &cuts, &params).unwrap();
            prop_assert!(validate_scheme(inst.prior(i), &dev.draft()).is_valid());
            if !dev.degenerate {
                prop_assert!(dev.s_star_mean >= cuts.e[i] * params.s_star_factor() - 1e-9);
            }
        }
    }

    #[test]
    fn certificates_are_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 4, 3, 2);
        let prof = random_profile(&mut r, &inst, 3);
        let cert = certify_poa(&inst, &prof, golden_parameters(), EvalMode::Exact).unwrap();
        let w = expected_welfare(&inst, &prof, EvalMode::Exact).unwrap().value;
        prop_assert!((cert.welfare - w).abs() <= 1e-9);
        match &cert.case {
            CertificateCase::DeviationWitness { i_star, scheme, gain } => {
                prop_assert!(*gain > 0.0);
                let dev = SignalingScheme::from_draft(inst.prior(*i_star), scheme).unwrap();
                let after = expected_utility(&inst, &prof.with_scheme(*i_star, dev), *i_star);
                prop_assert!((after - expected_utility(&inst, &prof, *i_star) - gain).abs() <= 1e-9);
            }
            CertificateCase::Case1 { bound } => prop_assert!((bound - golden_parameters().case1_bound()).abs() <= 1e-12),
            CertificateCase::Case2 { bound, .. } => prop_assert!((bound - golden_parameters().case2_bound()).abs() <= 1e-12),
            CertificateCase::InapplicableProfileNotNe { .. } => {}
        }
    }
}
