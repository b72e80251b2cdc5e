//! The single-winner certificate for identical priors and constant utility:
//! equilibria pass the tail check, pooling yields a profitable deviation.

use persuasion_poa::certify::{warmup_certify, WarmupOutcome};
use persuasion_poa::equilibria::{bernoulli_equilibrium_scheme, BernoulliEqSpec};
use persuasion_poa::model::StrategyProfile;

fn main() -> persuasion_poa::Result<()> {
    for n in [2, 3, 5, 10, 20] {
        let spec = BernoulliEqSpec::new(n, 1.0 / n as f64)?;
        let instance = spec.instance()?;
        let eq = StrategyProfile::symmetric(&instance, bernoulli_equilibrium_scheme(spec, 50)?)?;
        let cert = warmup_certify(&instance, &eq)?;
        println!(
            "N={n:>2} equilibrium: ratio {:.4} (<= 4), tail Pr[M >= E(2/N)] = {:.4}",
            cert.measured_ratio, cert.tail_probability
        );
        let pool = StrategyProfile::pooling(&instance);
        let cert = warmup_certify(&instance, &pool)?;
        match cert.outcome {
            WarmupOutcome::TailCheckPassed => {
                println!("       pooling: tail check passes (tail {:.3})", cert.tail_probability)
            }
            WarmupOutcome::DeviationWitness { i_star, gain_direct, gain_formula, .. } => println!(
                "       pooling: agent {i_star} deviates, gain {gain_direct:.4} (formula {gain_formula:.4})"
            ),
        }
    }
    Ok(())
}
