use rayon::prelude::*;
use serde::Serialize;

use super::{best_response, BestResponse, BrMode, DiscretizationSpec};
use crate::model::{expected_utility, Instance, StrategyProfile};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentRegret {
    pub agent: usize,
    pub current_utility: f64,
    pub best_response_utility: f64,
    pub regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretReport {
    pub agents: Vec<AgentRegret>,
    pub max_regret: f64,
    pub tolerance: f64,
    pub is_epsilon_ne: bool,
    /// Whether every scheme of the profile itself lies on the grain grid.
    pub profile_in_grain_space: bool,
    /// Whether any best response came from local search.
    pub heuristic: bool,
}

/// Regrets against best responses computed with `mode`, plus the best
/// responses themselves.
pub fn regret_report(
    instance: &Instance,
    profile: &StrategyProfile,
    spec: DiscretizationSpec,
    mode: BrMode,
    regret_tol: f64,
) -> Result<(RegretReport, Vec<BestResponse>)> {
    let brs: Vec<BestResponse> = (0..instance.n())
        .into_par_iter()
        .map(|i| best_response(instance, profile, i, spec, mode))
        .collect::<Result<_>>()?;
    let agents: Vec<AgentRegret> = brs
        .iter()
        .enumerate()
        .map(|(i, br)| {
            let current = expected_utility(instance, profile, i);
            AgentRegret {
                agent: i,
                current_utility: current,
                best_response_utility: br.utility,
                regret: (br.utility - current).max(0.0),
            }
        })
        .collect();
    let max_regret = agents.iter().map(|a| a.regret).fold(0.0, f64::max);
    let report = RegretReport {
        max_regret,
        tolerance: regret_tol,
        is_epsilon_ne: max_regret <= regret_tol,
        profile_in_grain_space: profile
            .schemes()
            .iter()
            .all(|s| s.in_grain_space(spec.epsilon)),
        heuristic: brs.iter().any(|b| b.heuristic),
        agents,
    };
    Ok((report, brs))
}

/// Exhaustive ε-NE check: every agent's best response over the full grain
/// space must gain at most `regret_tol`.
pub fn verify_epsilon_ne(
    instance: &Instance,
    profile: &StrategyProfile,
    spec: DiscretizationSpec,
    regret_tol: f64,
) -> Result<RegretReport> {
    regret_report(instance, profile, spec, BrMode::Exhaustive, regret_tol).map(|(r, _)| r)
}
