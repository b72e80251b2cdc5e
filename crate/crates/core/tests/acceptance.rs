//! One test per acceptance criterion. Each prints a `criterion N: PASS|FAIL`
//! line to stderr (visible without `--nocapture`) before asserting.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use persuasion_poa::certify::*;
use persuasion_poa::cli::run_from_args;
use persuasion_poa::equilibria::*;
use persuasion_poa::io;
use persuasion_poa::model::*;
use persuasion_poa::noisy::*;
use rand::Rng;
use serde_json::Value;
use tempfile::TempDir;

fn report(criterion: usize, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {criterion}: {verdict} | {detail}");
}

fn aligned_equilibrium(n: usize, zeta: f64, eps: f64) -> (Instance, StrategyProfile) {
    let spec = BernoulliEqSpec::new(n, zeta).unwrap();
    let inst = spec.instance().unwrap();
    let cells = grain_aligned_boundaries(spec, eps).unwrap();
    let scheme = bernoulli_equilibrium_scheme_on_cells(spec, &cells).unwrap();
    let prof = StrategyProfile::symmetric(&inst, scheme).unwrap();
    (inst, prof)
}

#[test]
fn criterion_01_symmetric_equilibrium_ratio() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, zeta) in [(2usize, 0.5f64), (3, 0.3), (5, 0.1), (10, 0.05)] {
        let lb = poa_lower_bound(BernoulliEqSpec::new(n, zeta).unwrap());
        let nf = n as f64;
        // Independent closed forms: first best 1−(1−ζ)^N, welfare N·p̂/(2N−1), p̂ = Nζ.
        let oracle_ratio = (1.0 - (1.0 - zeta).powi(n as i32)) / (nf * nf * zeta / (2.0 * nf - 1.0));
        let oracle_bound = (2.0 - 1.0 / nf) * (1.0 - (-nf * zeta).exp()) / (nf * zeta);
        let ok = (lb.exact_ratio - oracle_ratio).abs() <= 1e-12
            && (lb.bound - oracle_bound).abs() <= 1e-12
            && lb.exact_ratio >= lb.bound;
        pass &= ok;
        detail.push(format!("N={n} zeta={zeta}: exact {:.6} >= bound {:.6}", lb.exact_ratio, lb.bound));
    }
    let two = poa_lower_bound(BernoulliEqSpec::new(2, 0.5).unwrap()).exact_ratio;
    pass &= (two - 1.125).abs() <= 1e-9;
    detail.push(format!("N=2 ratio {two}"));
    report(1, pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_02_equilibrium_is_an_epsilon_ne() {
    let start = Instant::now();
    let spec = DiscretizationSpec::new(0.1).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, zeta) in [(2usize, 0.5f64), (3, 0.2)] {
        let (inst, prof) = aligned_equilibrium(n, zeta, 0.1);
        let report = verify_epsilon_ne(&inst, &prof, spec, 1e-6).unwrap();
        let curve = WinCurve::for_agent(&inst, &prof, 0);
        let (prior, u) = (inst.prior(0), inst.utility(0));
        let mut count = 0usize;
        let mut best = f64::NEG_INFINITY;
        for scheme in enumerate_discretized_schemes(prior, spec, usize::MAX).unwrap() {
            best = best.max(curve.utility_of(&scheme, prior, u));
            count += 1;
        }
        let ok = report.max_regret <= 1e-6 && best <= 1.0 / n as f64 + 1e-6;
        pass &= ok;
        // Equal cells are reported for comparison only; grain means fall
        // strictly inside them, so their regret is positive.
        let eq_spec = BernoulliEqSpec::new(n, zeta).unwrap();
        let equal = StrategyProfile::symmetric(&inst, bernoulli_equilibrium_scheme(eq_spec, 10).unwrap()).unwrap();
        let equal_regret = verify_epsilon_ne(&inst, &equal, spec, 1e-6).unwrap().max_regret;
        detail.push(format!(
            "N={n} zeta={zeta}: max regret {:.3e}, best of {count} deviations {best:.9} vs 1/N {:.9} (equal cells: regret {equal_regret:.3e})",
            report.max_regret,
            1.0 / n as f64
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed <= Duration::from_secs(120);
    detail.push(format!("{:.2}s", elapsed.as_secs_f64()));
    report(2, pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_03_welfare_upper_bound() {
    let mut r = rng(2003);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let inst = random_instance(&mut r, 5, 4, 2);
        let cuts = quantile_cuts(&inst);
        let fb = oracle_first_best(&inst);
        worst = worst.min(sw_prime_upper(&cuts) - fb);
        if sw_prime_upper(&cuts) < fb {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report(3, pass, &format!("200 instances, {violations} violations, min slack {worst:.3e}"));
    assert!(pass);
}

/// Profiles verified as ε-NE: grain-aligned Bernoulli equilibria and
/// converged best-response dynamics on random grid instances.
fn verified_fixtures() -> Vec<(String, Instance, StrategyProfile, bool)> {
    let mut out = Vec::new();
    let spec = DiscretizationSpec::new(0.1).unwrap();
    for (n, zeta) in [(2usize, 0.5f64), (2, 0.3), (3, 0.2), (3, 0.3), (4, 0.2), (5, 0.2), (10, 0.1)] {
        let (inst, prof) = aligned_equilibrium(n, zeta, 0.1);
        if verify_epsilon_ne(&inst, &prof, spec, 1e-6).unwrap().is_epsilon_ne {
            out.push((format!("bernoulli N={n} zeta={zeta}"), inst, prof, true));
        }
    }
    let spec = DiscretizationSpec::new(0.125).unwrap();
    let cfg = DynamicsConfig { max_rounds: 60, regret_tol: 1e-9, mode: BrMode::Exhaustive };
    let mut r = rng(2004);
    for t in 0..40 {
        let n = 2 + t % 2;
        let k = if n == 3 && t % 4 == 1 { 2 } else { 1 };
        let priors = (0..n)
            .map(|_| {
                let support = r.random_range(2..4);
                random_prior(&mut r, support, 0, Some(8))
            })
            .collect();
        let utilities = (0..n).map(|_| random_utility(&mut r)).collect();
        let inst = Instance::new(priors, utilities, k).unwrap();
        let start = StrategyProfile::full_revelation(&inst);
        let Ok(dyn_out) = best_response_dynamics(&inst, spec, start, cfg) else { continue };
        if dyn_out.converged && verify_epsilon_ne(&inst, &dyn_out.profile, spec, 1e-6).unwrap().is_epsilon_ne {
            out.push((format!("brd #{t}"), inst, dyn_out.profile, false));
        }
    }
    out
}

#[test]
fn criterion_04_certificates_on_equilibria() {
    let fixtures = verified_fixtures();
    let mut pass = fixtures.len() >= 10;
    let mut worst: f64 = 0.0;
    let mut bernoulli_worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (name, inst, prof, is_bernoulli) in &fixtures {
        let cert = certify_poa(inst, prof, golden_parameters(), EvalMode::Exact).unwrap();
        let limit = 22.1804 + inst.n() as f64 * 1e-6;
        let ok = !cert.is_witness() && cert.sw_prime_ratio <= limit;
        if !ok {
            failures.push(name.clone());
        }
        pass &= ok;
        worst = worst.max(cert.sw_prime_ratio);
        if *is_bernoulli {
            bernoulli_worst = bernoulli_worst.max(cert.measured_ratio);
            pass &= cert.measured_ratio <= 2.0;
        }
    }
    report(
        4,
        pass,
        &format!(
            "{} verified fixtures, max SW'/SW {worst:.4}, max Bernoulli FB/SW {bernoulli_worst:.4}, failures {failures:?}",
            fixtures.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_single_winner_regime() {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for n in 2..=20usize {
        for frac in [0.1, 0.5, 1.0] {
            let zeta = frac / n as f64;
            let spec = BernoulliEqSpec::new(n, zeta).unwrap();
            let inst = spec.instance().unwrap();
            let prof = StrategyProfile::symmetric(&inst, bernoulli_equilibrium_scheme(spec, 50).unwrap()).unwrap();
            let w = warmup_certify(&inst, &prof).unwrap();
            worst = worst.max(w.measured_ratio);
            pass &= w.measured_ratio <= 4.0;
        }
    }
    let mut missing = Vec::new();
    for n in 2..=20usize {
        let inst = Instance::bernoulli(n, 1.0 / n as f64, 1).unwrap();
        let w = warmup_certify(&inst, &StrategyProfile::pooling(&inst)).unwrap();
        let ok = match w.outcome {
            WarmupOutcome::DeviationWitness { gain_direct, gain_formula, profitable, .. } => {
                profitable && gain_direct > 0.0 && (gain_direct - gain_formula).abs() <= 1e-12
            }
            WarmupOutcome::TailCheckPassed => false,
        };
        if !ok {
            missing.push(n);
        }
        pass &= ok;
    }
    report(
        5,
        pass,
        &format!("max equilibrium ratio {worst:.4} (<= 4); pooling without a witness at N = {missing:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_deviation_signal_floor() {
    let params = golden_parameters();
    let mut r = rng(2006);
    let (mut triggers, mut nondegenerate, mut violations) = (0, 0, 0);
    let mut attempts = 0;
    while triggers < 200 && attempts < 100_000 {
        attempts += 1;
        let inst = random_instance(&mut r, 5, 4, 2);
        let prof = random_profile(&mut r, &inst, 4);
        let cuts = quantile_cuts(&inst);
        let c = contributions(&inst, &prof);
        for i in 0..inst.n() {
            if triggers == 200 || !(c[i] < cuts.e[i] * params.beta * cuts.q[i]) {
                continue;
            }
            triggers += 1;
            let dev = construct_deviation_signal(&inst, &prof, i, &cuts, &params).unwrap();
            if dev.degenerate {
                continue;
            }
            nondegenerate += 1;
            if dev.s_star_mean < cuts.e[i] * params.s_star_factor() - 1e-9 {
                violations += 1;
            }
        }
    }
    let pass = triggers == 200 && violations == 0;
    report(6, pass, &format!("{triggers} triggers, {nondegenerate} non-degenerate, {violations} violations"));
    assert!(pass);
}

#[test]
fn criterion_07_tie_break_oracle() {
    let mut r = rng(2007);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = r.random_range(1..=6);
        let k = r.random_range(1..=n);
        // A coarse value set forces frequent ties.
        let means: Vec<f64> = (0..n).map(|_| r.random_range(0..5) as f64 / 4.0).collect();
        let rho = selection_probabilities(&means, k).unwrap().rho;
        for (a, b) in rho.iter().zip(permutation_selection(&means, k)) {
            worst = worst.max((a - b).abs());
        }
    }
    let pass = worst <= 1e-12;
    report(7, pass, &format!("1000 mean vectors, max deviation {worst:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_08_grid_game_bound() {
    let p = grid_game_parameters();
    let mut pass = true;
    let mut detail = Vec::new();
    for (eps, n) in [(0.01, 5usize), (0.001, 10)] {
        let zeta = 1.0 / n as f64;
        let inst = Instance::bernoulli(n, zeta, 1).unwrap();
        let prof = StrategyProfile::pooling(&inst);
        let spec = DiscretizationSpec::new(eps).unwrap();
        let disc = discretized_certify(&inst, &prof, p, spec, EvalMode::Exact).unwrap();
        let stated = 22.459 / (1.0 - 2.3766 * eps * n as f64);
        let formula_ok = (disc.overall_bound - stated).abs() <= 1e-6;
        let cont = certify_poa(&inst, &prof, p, EvalMode::Exact).unwrap();
        let rel = (disc.overall_bound - cont.overall_bound).abs() / cont.overall_bound;
        let limit_ok = rel <= 10.0 * eps * n as f64;
        pass &= formula_ok && limit_ok;
        detail.push(format!(
            "eps={eps} N={n}: bound {:.9} vs stated {stated:.9} (diff {:.3e}); continuous {:.6}, rel diff {rel:.3e} <= {}",
            disc.overall_bound,
            (disc.overall_bound - stated).abs(),
            cont.overall_bound,
            10.0 * eps * n as f64
        ));
    }
    report(8, pass, &detail.join("; "));
    assert!(pass);
}

fn positive_instance(r: &mut rand_chacha::ChaCha8Rng) -> Instance {
    let n = r.random_range(2..=4);
    let k = r.random_range(1..n);
    let priors = (0..n)
        .map(|_| {
            let s = r.random_range(1..=3);
            random_prior(r, s, 5, None)
        })
        .collect();
    Instance::new(priors, (0..n).map(|_| random_utility(r)).collect(), k).unwrap()
}

#[test]
fn criterion_09_noisy_reductions() {
    let mut r = rng(2009);
    let mut pass = true;

    let inst = positive_instance(&mut r);
    let prof = random_profile(&mut r, &inst, 3);
    let clear = expected_welfare(&inst, &prof, EvalMode::Exact).unwrap().value;
    let zero = noisy_expected_welfare(&inst, &prof, NoiseSpec::for_instance(&inst, 0.0, 1_000_000, 1).unwrap()).unwrap();
    let zero_se = zero.std_err.unwrap();
    let reduction_ok = (zero.value - clear).abs() <= 4.0 * zero_se;
    pass &= reduction_ok;

    let mut violations = 0;
    for t in 0..50 {
        let inst = positive_instance(&mut r);
        let prof = random_profile(&mut r, &inst, 3);
        let clear = expected_welfare(&inst, &prof, EvalMode::Exact).unwrap().value;
        for eta in [0.05, 0.2] {
            let w = noisy_expected_welfare(&inst, &prof, NoiseSpec::for_instance(&inst, eta, 100_000, t).unwrap()).unwrap();
            if (1.0 - eta) / (1.0 + eta) * clear > w.value + 4.0 * w.std_err.unwrap() {
                violations += 1;
            }
        }
    }
    pass &= violations == 0;
    let bound_gap = (noisy_bound(0.0) - (11.0 + 5.0 * 5f64.sqrt())).abs();
    pass &= bound_gap <= 1e-9;
    report(
        9,
        pass,
        &format!(
            "eta=0: {:.6} vs {clear:.6} ({:.2} SE); sandwich violations {violations}/100; bound gap {bound_gap:.1e}",
            zero.value,
            (zero.value - clear).abs() / zero_se
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_unbounded_ratio() {
    let dir = TempDir::new().unwrap();
    let mut ratios = Vec::new();
    let mut pass = true;
    for (t, target) in ["0.1", "0.01", "0.001", "0.0001", "0.00001"].iter().enumerate() {
        let inst_path = dir.path().join(format!("shift-{t}.json"));
        let prof_path = dir.path().join(format!("shift-prof-{t}.json"));
        let out = run_from_args([
            "persuade", "--out", inst_path.to_str().unwrap(), "gen", "negative-shift",
            "--target", target, "--profile-out", prof_path.to_str().unwrap(),
        ])
        .unwrap();
        pass &= out.exit_code == 0;
        // Recompute the ratio from the files rather than trusting the summary.
        let inst = io::read_instance(&inst_path, true).unwrap();
        let prof = io::read_profile(&prof_path, &inst).unwrap();
        let fb = first_best(&inst, EvalMode::Exact).unwrap().value;
        let sw = expected_welfare(&inst, &prof, EvalMode::Exact).unwrap().value;
        let summary: Value = serde_json::from_str(&out.json).unwrap();
        pass &= (summary["summary"]["ratio"].as_f64().unwrap() - fb / sw).abs() <= 1e-6 * fb / sw;
        ratios.push(fb / sw);
    }
    pass &= ratios.windows(2).all(|w| w[1] > w[0]);
    for threshold in [10.0, 100.0, 1000.0] {
        pass &= ratios.iter().any(|&x| x > threshold);
    }
    let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.1}")).collect();
    report(10, pass, &format!("ratios {} as the target welfare shrinks", shown.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_11_determinism() {
    let dir = TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (inst, prof, pos, pos_prof) = (p("inst.json"), p("prof.json"), p("pos.json"), p("pos-prof.json"));
    run_from_args(["persuade", "equilibrium", "bernoulli", "--n", "3", "--zeta", "0.2", "--epsilon", "0.1", "--instance-out", &inst, "--profile-out", &prof]).unwrap();
    let mut r = rng(2011);
    let positive = positive_instance(&mut r);
    io::write_instance(std::path::Path::new(&pos), &positive).unwrap();
    io::write_profile(std::path::Path::new(&pos_prof), &random_profile(&mut r, &positive, 3)).unwrap();

    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "random", "--n", "5", "--k", "2", "--utility", "random-monotone", "--seed", "17"],
        vec!["first-best", "--instance", &inst, "--mode", "mc", "--samples", "200000", "--seed", "3"],
        vec!["welfare", "--instance", &inst, "--profile", &prof, "--mode", "mc", "--samples", "200000", "--seed", "4"],
        vec!["equilibrium", "brd", "--instance", &inst, "--epsilon", "0.1", "--br", "local", "--seed", "5", "--max-rounds", "20"],
        vec!["verify-ne", "--instance", &inst, "--profile", &prof, "--epsilon", "0.1"],
        vec!["certify", "general", "--instance", &inst, "--profile", &prof, "--mode", "mc", "--samples", "100000"],
        vec!["certify", "discretized", "--instance", &inst, "--profile", &prof, "--epsilon", "0.1"],
        vec!["noisy", "--instance", &pos, "--profile", &pos_prof, "--eta", "0.1", "--samples", "200000", "--seed", "6"],
        vec!["sweep", "--n", "2,5", "--zeta", "0.1,0.2", "--measured"],
    ];
    let mut mismatches = Vec::new();
    for args in &commands {
        let full: Vec<&str> = std::iter::once("persuade").chain(args.iter().copied()).collect();
        let outputs: Vec<String> = [1usize, 4, 1]
            .iter()
            .map(|&threads| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap()
                    .install(|| run_from_args(full.clone()).unwrap().json)
            })
            .collect();
        if outputs.iter().any(|o| o != &outputs[0] || o.is_empty()) {
            mismatches.push(args[0]);
        }
    }
    let pass = mismatches.is_empty();
    report(11, pass, &format!("{} commands at 1 and 4 threads, mismatches {mismatches:?}", commands.len()));
    assert!(pass);
}
