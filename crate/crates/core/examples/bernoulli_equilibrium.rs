//! The closed-form symmetric equilibrium of i.i.d. Bernoulli agents: its
//! posterior-mean CDF, discretizations of it, and their welfare.

use persuasion_poa::equilibria::{
    bernoulli_equilibrium_scheme, bernoulli_equilibrium_welfare, poa_lower_bound, BernoulliEqSpec,
};
use persuasion_poa::model::{contributions, expected_utility, StrategyProfile};

fn main() -> persuasion_poa::Result<()> {
    for (n, zeta) in [(2, 0.5), (3, 0.2), (10, 0.1)] {
        let spec = BernoulliEqSpec::new(n, zeta)?;
        let instance = spec.instance()?;
        let p = spec.p_hat();
        println!(
            "N={n} zeta={zeta}: p_hat={p}, G(p_hat/4)={:.4}, closed-form welfare {:.6}",
            spec.cdf(p / 4.0),
            bernoulli_equilibrium_welfare(spec)
        );
        for grid in [4, 16, 64] {
            let scheme = bernoulli_equilibrium_scheme(spec, grid)?;
            let profile = StrategyProfile::symmetric(&instance, scheme)?;
            let welfare: f64 = contributions(&instance, &profile).iter().sum();
            println!(
                "    {grid:>3} cells: welfare {welfare:.6}, utility of agent 0 {:.6} (1/N = {:.6})",
                expected_utility(&instance, &profile, 0),
                1.0 / n as f64
            );
        }
        let lb = poa_lower_bound(spec);
        println!("    exact ratio {:.6} >= lower bound {:.6}", lb.exact_ratio, lb.bound);
    }
    Ok(())
}
