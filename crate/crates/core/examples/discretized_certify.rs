//! Certificates in the grain game, where quantiles are truncated to the grid
//! and the first-case bound degrades with `εN`.

use persuasion_poa::certify::{grid_game_parameters, certify_poa, discretized_certify};
use persuasion_poa::equilibria::{bernoulli_equilibrium_scheme, BernoulliEqSpec, DiscretizationSpec};
use persuasion_poa::model::{EvalMode, StrategyProfile};

fn main() -> persuasion_poa::Result<()> {
    let params = grid_game_parameters();
    println!(
        "parameters {params:?}: case-1 bound {:.5}, case-2 bound {:.5}",
        params.case1_bound(),
        params.case2_bound()
    );
    for (eps, n, zeta) in [(0.01, 5, 0.2), (0.001, 10, 0.1), (0.01, 2, 0.5)] {
        let spec = BernoulliEqSpec::new(n, zeta)?;
        let instance = spec.instance()?;
        let profile = StrategyProfile::symmetric(&instance, bernoulli_equilibrium_scheme(spec, 20)?)?;
        let grid = DiscretizationSpec::new(eps)?;
        let cert = discretized_certify(&instance, &profile, params, grid, EvalMode::Exact)?;
        let plain = certify_poa(&instance, &profile, params, EvalMode::Exact)?;
        println!(
            "eps={eps} N={n}: bound {:.6} (continuous {:.6}), measured ratio {:.4}",
            cert.overall_bound, plain.overall_bound, cert.measured_ratio
        );
    }
    Ok(())
}
