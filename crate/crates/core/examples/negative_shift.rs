//! With values allowed below zero, shifting every prior left keeps the
//! equilibrium intact while its welfare approaches zero, so the ratio to the
//! first best grows without bound.

use persuasion_poa::equilibria::{
    bernoulli_equilibrium_scheme_on_cells, grain_aligned_boundaries, BernoulliEqSpec,
};
use persuasion_poa::model::{
    contributions, first_best, EvalMode, Instance, SignalingScheme, StrategyProfile,
};

fn main() -> persuasion_poa::Result<()> {
    let spec = BernoulliEqSpec::new(2, 0.5)?;
    let base = spec.instance()?;
    let cells = grain_aligned_boundaries(spec, 0.1)?;
    let scheme = bernoulli_equilibrium_scheme_on_cells(spec, &cells)?;
    let profile = StrategyProfile::symmetric(&base, scheme.clone())?;
    let welfare: f64 = contributions(&base, &profile).iter().sum();
    println!("unshifted welfare {welfare:.6}");
    for target in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let shift = welfare - target;
        let priors = base.priors().iter().map(|p| p.shifted(-shift)).collect::<Result<Vec<_>, _>>()?;
        let shifted = Instance::new(priors, base.utilities().to_vec(), 1)?;
        // Shifting preserves atom order, so the same allocations apply.
        let draft = scheme.to_draft();
        let moved = SignalingScheme::from_draft(shifted.prior(0), &draft)?;
        let profile = StrategyProfile::symmetric(&shifted, moved)?;
        let w: f64 = contributions(&shifted, &profile).iter().sum();
        let fb = first_best(&shifted, EvalMode::Exact)?.value;
        println!("target {target:.0e}: welfare {w:.3e}, first best {fb:.5}, ratio {:.1}", fb / w);
    }
    Ok(())
}
