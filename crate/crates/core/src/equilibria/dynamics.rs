use std::collections::HashMap;

use serde::Serialize;

use super::{best_response, regret_report, BrMode, DiscretizationSpec, RegretReport};
use crate::model::{expected_utility, Instance, StrategyProfile};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DynamicsConfig {
    pub max_rounds: usize,
    pub regret_tol: f64,
    pub mode: BrMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEntry {
    Switch {
        round: usize,
        agent: usize,
        from_utility: f64,
        to_utility: f64,
        signals: usize,
    },
    /// The profile at the end of `round` equals the one after `first_seen`.
    Cycle {
        round: usize,
        first_seen: usize,
        length: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsOutcome {
    pub profile: StrategyProfile,
    pub report: RegretReport,
    pub converged: bool,
    /// Number of passes that changed the profile.
    pub rounds: usize,
    pub log: Vec<LogEntry>,
}

fn fingerprint(profile: &StrategyProfile) -> String {
    let mut s = String::new();
    for scheme in profile.schemes() {
        for sig in scheme.signals() {
            for m in sig.alloc() {
                s.push_str(&format!("{m:.12e},"));
            }
            s.push(';');
        }
        s.push('|');
    }
    s
}

/// Round-robin best-response dynamics.
///
/// An agent switches only when its best response gains more than
/// `regret_tol`. The run converges on the first pass with no switch; it stops
/// unconverged after `max_rounds` passes or when a pass ends on a profile seen
/// before (deterministic responses then repeat forever).
pub fn best_response_dynamics(
    instance: &Instance,
    spec: DiscretizationSpec,
    init: StrategyProfile,
    cfg: DynamicsConfig,
) -> Result<DynamicsOutcome> {
    let mut profile = init;
    let mut log = Vec::new();
    let mut seen = HashMap::new();
    seen.insert(fingerprint(&profile), 0usize);
    let mut rounds = 0;
    let mut converged = false;
    for round in 1..=cfg.max_rounds {
        let mut changed = false;
        for i in 0..instance.n() {
            let br = best_response(instance, &profile, i, spec, cfg.mode)?;
            let current = expected_utility(instance, &profile, i);
            if br.utility > current + cfg.regret_tol {
                log.push(LogEntry::Switch {
                    round,
                    agent: i,
                    from_utility: current,
                    to_utility: br.utility,
                    signals: br.scheme.len(),
                });
                profile = profile.with_scheme(i, br.scheme);
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
        rounds = round;
        let fp = fingerprint(&profile);
        if let Some(&first_seen) = seen.get(&fp) {
            log.push(LogEntry::Cycle {
                round,
                first_seen,
                length: round - first_seen,
            });
            break;
        }
        seen.insert(fp, round);
    }
    let (report, _) = regret_report(instance, &profile, spec, cfg.mode, cfg.regret_tol)?;
    Ok(DynamicsOutcome {
        profile,
        report,
        converged,
        rounds,
        log,
    })
}
