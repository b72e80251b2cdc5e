//! Welfare of a few profiles against the full-information first best, by
//! exact enumeration and by seeded Monte Carlo.

use persuasion_poa::mc::McConfig;
use persuasion_poa::model::{
    contributions, expected_welfare, first_best, selection_probabilities, EvalMode, Instance,
    Prior, StrategyProfile, UtilityFn,
};

fn main() -> persuasion_poa::Result<()> {
    // Tie-breaking: two agents tied at the top share the single slot.
    let sel = selection_probabilities(&[0.7, 0.7, 0.2], 1)?;
    println!("selection of [0.7, 0.7, 0.2] with k=1: {:?}", sel.rho);

    let n = 6;
    let instance = Instance::bernoulli(n, 1.0 / n as f64, 1)?;
    let exact = first_best(&instance, EvalMode::Exact)?;
    let mc = first_best(&instance, EvalMode::MonteCarlo(McConfig::new(1_000_000, 7)))?;
    println!(
        "Bernoulli(1/{n}) first best: exact {:.6}, closed form {:.6}, MC {:.6} +- {:.6}",
        exact.value,
        1.0 - (1.0 - 1.0 / n as f64).powi(n as i32),
        mc.value,
        mc.std_err.unwrap_or(0.0)
    );
    for (label, profile) in [
        ("pooling", StrategyProfile::pooling(&instance)),
        ("full revelation", StrategyProfile::full_revelation(&instance)),
    ] {
        let w = expected_welfare(&instance, &profile, EvalMode::Exact)?;
        println!("  {label}: welfare {:.6}, ratio {:.3}", w.value, exact.value / w.value);
    }

    // Heterogeneous priors, k = 2, value-dependent utility.
    let priors = vec![
        Prior::new([(0.1, 0.5), (0.9, 0.5)])?,
        Prior::new([(0.3, 0.25), (0.5, 0.5), (0.8, 0.25)])?,
        Prior::point(0.45)?,
        Prior::new([(0.0, 0.8), (1.0, 0.2)])?,
    ];
    let instance = Instance::new(priors, vec![UtilityFn::identity(); 4], 2)?;
    let reveal = StrategyProfile::full_revelation(&instance);
    let c = contributions(&instance, &reveal);
    println!(
        "k=2 mixed instance: first best {:.6}, full-revelation contributions {:?} (sum {:.6})",
        first_best(&instance, EvalMode::Exact)?.value,
        c.iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>(),
        c.iter().sum::<f64>()
    );
    Ok(())
}
