//! Selection when the principal sees each posterior mean scaled by uniform
//! noise on `[1−η, 1+η]`.

use persuasion_poa::model::{expected_welfare, EvalMode, Instance, Prior, StrategyProfile, UtilityFn};
use persuasion_poa::noisy::{noisy_bound, noisy_expected_utility, noisy_expected_welfare, NoiseSpec};

fn main() -> persuasion_poa::Result<()> {
    let priors = vec![
        Prior::new([(0.2, 0.5), (0.9, 0.5)])?,
        Prior::new([(0.3, 0.6), (0.7, 0.4)])?,
        Prior::new([(0.25, 0.3), (0.5, 0.4), (0.95, 0.3)])?,
    ];
    let instance = Instance::new(priors, vec![UtilityFn::constant(1.0)?; 3], 1)?;
    let profile = StrategyProfile::full_revelation(&instance);
    let clear = expected_welfare(&instance, &profile, EvalMode::Exact)?.value;
    println!("noiseless welfare {clear:.5}");
    for eta in [0.0, 0.05, 0.2, 0.5] {
        let noise = NoiseSpec::for_instance(&instance, eta, 400_000, 11)?;
        let w = noisy_expected_welfare(&instance, &profile, noise)?;
        let u0 = noisy_expected_utility(&instance, &profile, 0, noise)?;
        let floor = (1.0 - eta) / (1.0 + eta) * clear;
        println!(
            "eta={eta}: welfare {:.5} +- {:.5} (floor {floor:.5}), agent 0 selected {:.4}, bound {:.3}",
            w.value,
            w.std_err.unwrap_or(0.0),
            u0.value,
            noisy_bound(eta)
        );
    }
    Ok(())
}
