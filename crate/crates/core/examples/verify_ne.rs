//! Checks the symmetric Bernoulli equilibrium against every 10-grain
//! deviation, and shows full revelation failing the same check.

use persuasion_poa::equilibria::{
    bernoulli_equilibrium_scheme, bernoulli_equilibrium_scheme_on_cells, grain_aligned_boundaries,
    verify_epsilon_ne, BernoulliEqSpec, DiscretizationSpec,
};
use persuasion_poa::model::StrategyProfile;

fn main() -> persuasion_poa::Result<()> {
    let grains = DiscretizationSpec::new(0.1)?;
    for (n, zeta) in [(2, 0.5), (3, 0.2)] {
        let spec = BernoulliEqSpec::new(n, zeta)?;
        let instance = spec.instance()?;

        let cells = grain_aligned_boundaries(spec, grains.epsilon)?;
        let aligned = bernoulli_equilibrium_scheme_on_cells(spec, &cells)?;
        let profile = StrategyProfile::symmetric(&instance, aligned)?;
        let report = verify_epsilon_ne(&instance, &profile, grains, 1e-6)?;
        println!(
            "N={n} zeta={zeta}: grain-aligned cells ({}) max regret {:.3e}, best deviation {:.9} vs 1/N = {:.9}",
            cells.len() - 1,
            report.max_regret,
            report.agents[0].best_response_utility,
            1.0 / n as f64
        );

        let uniform = bernoulli_equilibrium_scheme(spec, 10)?;
        let profile = StrategyProfile::symmetric(&instance, uniform)?;
        let report = verify_epsilon_ne(&instance, &profile, grains, 1e-6)?;
        println!("           uniform 10-cell grid max regret {:.3e}", report.max_regret);

        let reveal = StrategyProfile::full_revelation(&instance);
        let report = verify_epsilon_ne(&instance, &reveal, grains, 1e-6)?;
        println!(
            "           full revelation max regret {:.3e} (epsilon-NE: {})",
            report.max_regret, report.is_epsilon_ne
        );
    }
    Ok(())
}
