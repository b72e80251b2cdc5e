use serde::Serialize;

use super::{CertParams, QuantileCutResult};
use crate::model::{Instance, SchemeDraft, SignalingScheme, StrategyProfile, WinCurve};
use crate::{Error, Result, MASS_EPS};

/// Gains above this count as a profitable deviation.
pub const GAIN_TOL: f64 = 1e-12;

/// Result of pooling an agent's low-win top-quantile mass into one signal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationSignal {
    pub agent: usize,
    /// `min(φ·q_i, 1)`.
    pub top_fraction: f64,
    /// Win probability of each original signal.
    pub win: Vec<f64>,
    /// Indices of original signals with win probability below `τ`.
    pub low_signals: Vec<usize>,
    /// Per-atom mass moved into the new signal.
    pub moved: Vec<f64>,
    pub s_star_mean: f64,
    pub s_star_mass: f64,
    /// The moved mass is below [`MASS_EPS`]; no claim can be made.
    pub degenerate: bool,
    #[serde(skip)]
    pub scheme: SignalingScheme,
}

/// Builds the deviation signal for small contributor `agent`.
///
/// Each atom's top-quantile part is attributed to the original signals in
/// descending signal order; the new signal collects the top-quantile mass
/// held by signals whose win probability is below `τ`.
pub fn construct_deviation_signal(
    instance: &Instance,
    profile: &StrategyProfile,
    agent: usize,
    cuts: &QuantileCutResult,
    params: &CertParams,
) -> Result<DeviationSignal> {
    let prior = instance.prior(agent);
    let scheme = profile.scheme(agent);
    let curve = WinCurve::for_agent(instance, profile, agent);
    let q = cuts.q[agent];
    let contribution = curve.contribution_of(scheme);
    if !(contribution < cuts.e[agent] * params.beta * q) {
        return Err(Error::NotSmallContributor { agent });
    }
    let top_fraction = (params.phi * q).min(1.0);
    let top = prior.top_quantile_alloc(top_fraction);
    let win = curve.per_signal(scheme);
    let low_signals: Vec<usize> = (0..scheme.len()).filter(|&s| win[s] < params.tau).collect();

    let mut allocs: Vec<Vec<f64>> = scheme.signals().iter().map(|s| s.alloc().to_vec()).collect();
    let mut moved = vec![0.0; prior.len()];
    for (atom, &top_mass) in top.iter().enumerate() {
        let mut left = top_mass;
        for s in (0..scheme.len()).rev() {
            if left <= 0.0 {
                break;
            }
            let part = allocs[s][atom].min(left);
            left -= part;
            if win[s] < params.tau {
                allocs[s][atom] -= part;
                moved[atom] += part;
            }
        }
    }
    let s_star_mass: f64 = moved.iter().sum();
    let degenerate = s_star_mass < MASS_EPS;
    let s_star_mean = if degenerate {
        f64::NAN
    } else {
        moved
            .iter()
            .zip(prior.atoms())
            .map(|(m, a)| m * a.value)
            .sum::<f64>()
            / s_star_mass
    };
    let new_scheme = if degenerate {
        scheme.clone()
    } else {
        allocs.push(moved.clone());
        SignalingScheme::from_allocations(prior, allocs)?
    };
    Ok(DeviationSignal {
        agent,
        top_fraction,
        win,
        low_signals,
        moved,
        s_star_mean,
        s_star_mass,
        degenerate,
        scheme: new_scheme,
    })
}

/// Effect of switching to the scheme containing the deviation signal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationAnalysis {
    /// Utility after minus utility before.
    pub gain: f64,
    /// Probability of being selected when the deviation signal is sent.
    pub s_star_win: f64,
    pub profitable: bool,
}

pub fn deviation_analysis(
    instance: &Instance,
    profile: &StrategyProfile,
    dev: &DeviationSignal,
) -> DeviationAnalysis {
    let i = dev.agent;
    let curve = WinCurve::for_agent(instance, profile, i);
    let prior = instance.prior(i);
    let u = instance.utility(i);
    let before = curve.utility_of(profile.scheme(i), prior, u);
    let after = curve.utility_of(&dev.scheme, prior, u);
    let gain = after - before;
    let s_star_win = if dev.degenerate {
        0.0
    } else {
        curve.eval(dev.s_star_mean)
    };
    DeviationAnalysis {
        gain,
        s_star_win,
        profitable: gain > GAIN_TOL,
    }
}

impl DeviationSignal {
    pub fn draft(&self) -> SchemeDraft {
        self.scheme.to_draft()
    }
}
