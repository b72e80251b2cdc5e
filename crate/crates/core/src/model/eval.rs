use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use super::{own_selection_prob, selection_probabilities, Instance, Prior, SignalingScheme, StrategyProfile, UtilityFn};
use crate::mc::{self, Categorical, McConfig};
use crate::{Error, Result, TOL};

/// Largest joint outcome count evaluated by exact enumeration.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Enumerate; fails with `CapExceeded` above the cap.
    Exact,
    MonteCarlo(McConfig),
    /// Enumerate when within the cap, otherwise Monte Carlo.
    Auto(McConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A computed quantity; `std_err` is present only for Monte Carlo results.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: Option<f64>,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_err: None,
            method: Method::Exact,
        }
    }
}

#[derive(Clone, Debug)]
struct OpponentDist {
    means: Vec<f64>,
    cum: Vec<f64>,
}

impl OpponentDist {
    fn new(scheme: &SignalingScheme) -> Self {
        let means = scheme.means();
        let mut cum = Vec::with_capacity(means.len() + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for m in scheme.masses() {
            acc += m;
            cum.push(acc);
        }
        Self { means, cum }
    }

    /// `(mass strictly above x, mass tied with x)`.
    fn above_tie(&self, x: f64) -> (f64, f64) {
        let lo = self.means.partition_point(|&m| m < x - TOL);
        let hi = self.means.partition_point(|&m| m <= x + TOL);
        let total = self.cum[self.means.len()];
        (total - self.cum[hi], self.cum[hi] - self.cum[lo])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    At(usize),
    Between(usize),
}

/// Probability that one agent is selected as a function of the mean it
/// sends, against fixed opponent schemes.
///
/// The curve is a step function whose steps sit at the opponents' means, so
/// each step is computed once and cached.
#[derive(Debug)]
pub struct WinCurve {
    k: usize,
    opponents: Vec<OpponentDist>,
    breakpoints: Vec<f64>,
    at: Vec<OnceLock<f64>>,
    between: Vec<OnceLock<f64>>,
}

impl WinCurve {
    pub fn new<'a>(k: usize, opponents: impl IntoIterator<Item = &'a SignalingScheme>) -> Self {
        let opponents: Vec<OpponentDist> = opponents.into_iter().map(OpponentDist::new).collect();
        let mut all: Vec<f64> = opponents.iter().flat_map(|o| o.means.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        let mut breakpoints: Vec<f64> = Vec::new();
        for m in all {
            if breakpoints.last().is_none_or(|&b| m > b + TOL) {
                breakpoints.push(m);
            }
        }
        let at = (0..breakpoints.len()).map(|_| OnceLock::new()).collect();
        let between = (0..=breakpoints.len()).map(|_| OnceLock::new()).collect();
        Self {
            k,
            opponents,
            breakpoints,
            at,
            between,
        }
    }

    /// Curve for agent `i` of `profile`.
    pub fn for_agent(instance: &Instance, profile: &StrategyProfile, i: usize) -> Self {
        Self::new(
            instance.k(),
            profile
                .schemes()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, s)| s),
        )
    }

    /// Distinct opponent means (clustered within [`TOL`]), ascending.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn region(&self, x: f64) -> Region {
        let idx = self.breakpoints.partition_point(|&b| b < x);
        for j in [idx.wrapping_sub(1), idx] {
            if j < self.breakpoints.len() && (self.breakpoints[j] - x).abs() <= TOL {
                return Region::At(j);
            }
        }
        Region::Between(idx)
    }

    fn representative(&self, region: Region) -> f64 {
        let bp = &self.breakpoints;
        match region {
            Region::At(j) => bp[j],
            Region::Between(_) if bp.is_empty() => 0.0,
            Region::Between(0) => bp[0] - 1.0,
            Region::Between(i) if i == bp.len() => bp[i - 1] + 1.0,
            Region::Between(i) => 0.5 * (bp[i - 1] + bp[i]),
        }
    }

    /// Exact `Pr[selected | own mean = x]` by a DP over the number of
    /// opponents strictly above and tied.
    fn compute(&self, x: f64) -> f64 {
        let n = self.opponents.len();
        let k = self.k;
        // dist[a][t], with `a` saturated at k (selection is impossible there).
        let mut dist = vec![vec![0.0; n + 1]; k + 1];
        dist[0][0] = 1.0;
        for (seen, opp) in self.opponents.iter().enumerate() {
            let (above, tie) = opp.above_tie(x);
            let below = (1.0 - above - tie).max(0.0);
            let mut next = vec![vec![0.0; n + 1]; k + 1];
            for a in 0..=k {
                for t in 0..=seen {
                    let p = dist[a][t];
                    if p == 0.0 {
                        continue;
                    }
                    next[a][t] += p * below;
                    next[(a + 1).min(k)][t] += p * above;
                    next[a][t + 1] += p * tie;
                }
            }
            dist = next;
        }
        let mut w = 0.0;
        for (a, row) in dist.iter().enumerate().take(k) {
            for (t, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    w += p * own_selection_prob(k, a, t);
                }
            }
        }
        w
    }

    pub fn eval(&self, x: f64) -> f64 {
        let region = self.region(x);
        let cell = match region {
            Region::At(j) => &self.at[j],
            Region::Between(i) => &self.between[i],
        };
        *cell.get_or_init(|| self.compute(self.representative(region)))
    }

    /// Win probability of each signal of `scheme`.
    pub fn per_signal(&self, scheme: &SignalingScheme) -> Vec<f64> {
        scheme.signals().iter().map(|s| self.eval(s.posterior_mean())).collect()
    }

    /// Expected utility of playing `scheme` against this curve.
    pub fn utility_of(&self, scheme: &SignalingScheme, prior: &Prior, u: &UtilityFn) -> f64 {
        scheme
            .signals()
            .iter()
            .map(|s| self.eval(s.posterior_mean()) * s.weighted_sum(prior, |v| u.eval(v)))
            .sum()
    }

    /// Value contribution `Σ_s mass_s · w(s) · mean_s` of `scheme`.
    pub fn contribution_of(&self, scheme: &SignalingScheme) -> f64 {
        scheme
            .signals()
            .iter()
            .map(|s| s.total_mass() * self.eval(s.posterior_mean()) * s.posterior_mean())
            .sum()
    }

    /// Overall selection probability `Σ_s mass_s · w(s)`.
    pub fn selection_rate_of(&self, scheme: &SignalingScheme) -> f64 {
        scheme
            .signals()
            .iter()
            .map(|s| s.total_mass() * self.eval(s.posterior_mean()))
            .sum()
    }
}

/// Per-signal win probabilities `w_i(s)` and overall selection rates `r_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WinProbabilities {
    pub per_signal: Vec<Vec<f64>>,
    pub r: Vec<f64>,
    pub per_signal_std_err: Option<Vec<Vec<f64>>>,
    pub r_std_err: Option<Vec<f64>>,
    pub method: Method,
}

/// Exact win probabilities.
pub fn win_probabilities(instance: &Instance, profile: &StrategyProfile) -> WinProbabilities {
    let (per_signal, r): (Vec<_>, Vec<_>) = (0..instance.n())
        .into_par_iter()
        .map(|i| {
            let curve = WinCurve::for_agent(instance, profile, i);
            let scheme = profile.scheme(i);
            (curve.per_signal(scheme), curve.selection_rate_of(scheme))
        })
        .unzip();
    WinProbabilities {
        per_signal,
        r,
        per_signal_std_err: None,
        r_std_err: None,
        method: Method::Exact,
    }
}

/// Monte Carlo win probabilities: `w_i(s)` is estimated as
/// `E[ρ_i · 1{σ_i = s}] / Pr[s]`.
pub fn win_probabilities_mc(
    instance: &Instance,
    profile: &StrategyProfile,
    cfg: McConfig,
) -> WinProbabilities {
    let n = instance.n();
    let k = instance.k();
    let samplers: Vec<Categorical> = profile
        .schemes()
        .iter()
        .map(|s| Categorical::new(s.masses()))
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for s in profile.schemes() {
        offsets.push(offsets.last().unwrap() + s.len());
    }
    let total = offsets[n];
    let m = mc::estimate(cfg, total + n, |rng, out| {
        let mut means = Vec::with_capacity(n);
        let mut picks = Vec::with_capacity(n);
        for (i, sampler) in samplers.iter().enumerate() {
            let s = sampler.sample(rng);
            picks.push(s);
            means.push(profile.scheme(i).signals()[s].posterior_mean());
        }
        let rho = selection_probabilities(&means, k).expect("k validated by instance").rho;
        for i in 0..n {
            let mass = profile.scheme(i).signals()[picks[i]].total_mass();
            out[offsets[i] + picks[i]] = rho[i] / mass;
            out[total + i] = rho[i];
        }
    });
    let split = |v: &[f64]| -> Vec<Vec<f64>> {
        (0..n).map(|i| v[offsets[i]..offsets[i + 1]].to_vec()).collect()
    };
    WinProbabilities {
        per_signal: split(&m.mean),
        r: m.mean[total..].to_vec(),
        per_signal_std_err: Some(split(&m.std_err)),
        r_std_err: Some(m.std_err[total..].to_vec()),
        method: Method::MonteCarlo {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    }
}

/// Exact expected utility of agent `i`.
pub fn expected_utility(instance: &Instance, profile: &StrategyProfile, i: usize) -> f64 {
    WinCurve::for_agent(instance, profile, i).utility_of(
        profile.scheme(i),
        instance.prior(i),
        instance.utility(i),
    )
}

/// Exact value contributions `c_i`; they sum to the expected welfare.
pub fn contributions(instance: &Instance, profile: &StrategyProfile) -> Vec<f64> {
    (0..instance.n())
        .into_par_iter()
        .map(|i| WinCurve::for_agent(instance, profile, i).contribution_of(profile.scheme(i)))
        .collect()
}

/// `(value, probability)` outcomes of one agent.
type Outcomes = Vec<(f64, f64)>;

fn top_k_sum(buf: &mut [f64], k: usize) -> f64 {
    if k < buf.len() {
        buf.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    }
    buf[..k].iter().sum()
}

/// `E[sum of the k largest]` over independent agents, by enumeration.
fn enumerate_top_k(agents: &[Outcomes], k: usize) -> f64 {
    let n = agents.len();
    let first = &agents[0];
    let rest = &agents[1..];
    let partials: Vec<f64> = first
        .par_iter()
        .map(|&(v0, p0)| {
            let mut idx = vec![0usize; rest.len()];
            let mut buf = vec![0.0; n];
            let mut acc = 0.0;
            loop {
                let mut p = p0;
                buf[0] = v0;
                for (j, agent) in rest.iter().enumerate() {
                    let (v, q) = agent[idx[j]];
                    buf[j + 1] = v;
                    p *= q;
                }
                acc += p * top_k_sum(&mut buf, k);
                let mut pos = 0;
                loop {
                    if pos == rest.len() {
                        return acc;
                    }
                    idx[pos] += 1;
                    if idx[pos] < rest[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();
    partials.iter().sum()
}

fn sample_top_k(agents: &[Outcomes], k: usize, cfg: McConfig) -> Estimate {
    let samplers: Vec<Categorical> = agents
        .iter()
        .map(|a| Categorical::new(a.iter().map(|&(_, p)| p)))
        .collect();
    let m = mc::estimate(cfg, 1, |rng, out| {
        let mut buf: Vec<f64> = samplers
            .iter()
            .zip(agents)
            .map(|(s, a)| a[s.sample(rng)].0)
            .collect();
        out[0] = top_k_sum(&mut buf, k);
    });
    Estimate {
        value: m.mean[0],
        std_err: Some(m.std_err[0]),
        method: Method::MonteCarlo {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    }
}

fn top_k_expectation(agents: &[Outcomes], k: usize, mode: EvalMode, cap: u128) -> Result<Estimate> {
    let needed = agents
        .iter()
        .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128));
    match mode {
        EvalMode::Exact if needed > cap => Err(Error::CapExceeded { needed, cap }),
        EvalMode::Exact => Ok(Estimate::exact(enumerate_top_k(agents, k))),
        EvalMode::Auto(_) if needed <= cap => Ok(Estimate::exact(enumerate_top_k(agents, k))),
        EvalMode::Auto(cfg) | EvalMode::MonteCarlo(cfg) => Ok(sample_top_k(agents, k, cfg)),
    }
}

/// Expected sum of the `k` highest posterior means.
pub fn expected_welfare(instance: &Instance, profile: &StrategyProfile, mode: EvalMode) -> Result<Estimate> {
    expected_welfare_with_cap(instance, profile, mode, ENUMERATION_CAP)
}

pub fn expected_welfare_with_cap(
    instance: &Instance,
    profile: &StrategyProfile,
    mode: EvalMode,
    cap: u128,
) -> Result<Estimate> {
    let agents: Vec<Outcomes> = profile
        .schemes()
        .iter()
        .map(|s| s.signals().iter().map(|x| (x.posterior_mean(), x.total_mass())).collect())
        .collect();
    top_k_expectation(&agents, instance.k(), mode, cap)
}

/// First-best welfare: expected sum of the `k` highest realized values.
pub fn first_best(instance: &Instance, mode: EvalMode) -> Result<Estimate> {
    first_best_with_cap(instance, mode, ENUMERATION_CAP)
}

pub fn first_best_with_cap(instance: &Instance, mode: EvalMode, cap: u128) -> Result<Estimate> {
    let agents: Vec<Outcomes> = instance
        .priors()
        .iter()
        .map(|p| p.atoms().iter().map(|a| (a.value, a.mass)).collect())
        .collect();
    top_k_expectation(&agents, instance.k(), mode, cap)
}
