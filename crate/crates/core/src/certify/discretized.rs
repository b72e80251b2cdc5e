use super::certificate::{Pipeline, PoACertificate};
use super::{quantile_cuts, CertParams};
use crate::equilibria::DiscretizationSpec;
use crate::model::{EvalMode, Instance, StrategyProfile};
use crate::{Error, Result};

/// The two-case argument in the grid game: quantiles are truncated to the
/// grid and the first case loses `εN` of its margin. `φ` must be an integer
/// so that `φ·q̂_i` stays on the grid.
///
/// When no agent can fall short of `α·q̂_i` (possible only once
/// `εN ≥ 1 − 1/α`) the first case holds vacuously with an infinite bound.
pub fn discretized_certify(
    instance: &Instance,
    profile: &StrategyProfile,
    params: CertParams,
    spec: DiscretizationSpec,
    mode: EvalMode,
) -> Result<PoACertificate> {
    if params.phi.fract() != 0.0 {
        return Err(Error::SpecViolation(format!("phi = {} is not an integer", params.phi)));
    }
    for prior in instance.priors() {
        spec.grains(prior)?;
    }
    let cuts = quantile_cuts(instance);
    let truncated = cuts.truncated(instance, spec.epsilon);
    let case1_bound = params.discretized_case1_bound(spec.epsilon, instance.n());
    Pipeline {
        instance,
        profile,
        params,
        original_e: cuts.e.clone(),
        cuts: truncated,
        case1_bound,
        mode,
        allow_empty_n2: case1_bound.is_infinite(),
    }
    .run()
}
