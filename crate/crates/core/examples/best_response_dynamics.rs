//! Round-robin best-response dynamics in the 10-grain game: one run that
//! converges immediately and one that cycles.

use persuasion_poa::equilibria::{
    best_response_dynamics, bernoulli_equilibrium_scheme_on_cells, grain_aligned_boundaries,
    BernoulliEqSpec, BrMode, DiscretizationSpec, DynamicsConfig, LogEntry,
};
use persuasion_poa::model::StrategyProfile;

fn main() -> persuasion_poa::Result<()> {
    let grains = DiscretizationSpec::new(0.1)?;
    let cfg = DynamicsConfig {
        max_rounds: 50,
        regret_tol: 1e-6,
        mode: BrMode::Exhaustive,
    };
    let spec = BernoulliEqSpec::new(2, 0.5)?;
    let instance = spec.instance()?;

    let cells = grain_aligned_boundaries(spec, grains.epsilon)?;
    let eq = bernoulli_equilibrium_scheme_on_cells(spec, &cells)?;
    let start = StrategyProfile::symmetric(&instance, eq)?;
    let out = best_response_dynamics(&instance, grains, start, cfg)?;
    println!(
        "from the equilibrium: converged={} after {} rounds, max regret {:.2e}",
        out.converged, out.rounds, out.report.max_regret
    );

    let out = best_response_dynamics(&instance, grains, StrategyProfile::pooling(&instance), cfg)?;
    println!(
        "from pooling: converged={} after {} rounds, max regret {:.3}",
        out.converged, out.rounds, out.report.max_regret
    );
    for entry in &out.log {
        match entry {
            LogEntry::Switch { round, agent, from_utility, to_utility, signals } => println!(
                "  round {round}: agent {agent} {from_utility:.4} -> {to_utility:.4} ({signals} signals)"
            ),
            LogEntry::Cycle { round, first_seen, length } => println!(
                "  round {round}: profile repeats round {first_seen} (cycle length {length})"
            ),
        }
    }
    Ok(())
}
