use serde::Serialize;

use super::deviation::{construct_deviation_signal, deviation_analysis};
use super::{quantile_cuts, CertParams, QuantileCutResult};
use crate::model::{
    contributions, first_best, win_probabilities, EvalMode, Estimate, Instance, Method,
    SchemeDraft, StrategyProfile,
};
use crate::{Error, Result, TOL};

/// Agents split by selection rate against their quantile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    /// `r_i ≥ α·q_i`.
    pub n1: Vec<usize>,
    /// `r_i < α·q_i`; never empty for a consistent profile.
    pub n2: Vec<usize>,
    pub r: Vec<f64>,
}

pub fn classify_agents(
    instance: &Instance,
    profile: &StrategyProfile,
    cuts: &QuantileCutResult,
    params: &CertParams,
) -> Result<Classification> {
    let c = split(instance, profile, cuts, params);
    if c.n2.is_empty() {
        return Err(empty_n2());
    }
    Ok(c)
}

fn split(
    instance: &Instance,
    profile: &StrategyProfile,
    cuts: &QuantileCutResult,
    params: &CertParams,
) -> Classification {
    let r = win_probabilities(instance, profile).r;
    let (n1, n2): (Vec<usize>, Vec<usize>) =
        (0..instance.n()).partition(|&i| r[i] >= params.alpha * cuts.q[i]);
    Classification { n1, n2, r }
}

fn empty_n2() -> Error {
    Error::InternalInvariant("every agent is selected at least alpha times its quantile".into())
}

/// Numerical check of the order-statistic tail used in the second case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    /// Agents whose tail mean exceeds the deviating agent's.
    pub large: Vec<usize>,
    pub small: Vec<usize>,
    /// Rank `k − |large|` of the order statistic among `small`.
    pub order: usize,
    pub threshold: f64,
    /// `Pr[order-th largest mean among small ≥ threshold]`.
    pub probability: f64,
    pub required: f64,
    pub holds: bool,
    pub method: Method,
}

/// Exact `Pr[at least `order` of `agents` send a mean ≥ threshold]`.
fn order_statistic_tail(profile: &StrategyProfile, agents: &[usize], order: usize, threshold: f64) -> f64 {
    let mut dist = vec![0.0; agents.len() + 1];
    dist[0] = 1.0;
    for (seen, &j) in agents.iter().enumerate() {
        let p: f64 = profile
            .scheme(j)
            .signals()
            .iter()
            .filter(|s| s.posterior_mean() >= threshold - TOL)
            .map(|s| s.total_mass())
            .sum();
        for c in (0..=seen + 1).rev() {
            let stay = dist[c] * (1.0 - p);
            let up = if c > 0 { dist[c - 1] * p } else { 0.0 };
            dist[c] = stay + up;
        }
    }
    dist[order.min(dist.len())..].iter().sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CertificateCase {
    /// Every agent of `n2` contributes at least `β·E_i·q_i`.
    Case1 { bound: f64 },
    /// A small contributor exists and its deviation signal does not pay.
    Case2 {
        i_star: usize,
        s_star_mean: f64,
        s_star_mass: f64,
        /// `E_{i*}·(1/φ − β/(τφ))`, the guaranteed floor for `s_star_mean`.
        s_star_floor: f64,
        s_star_win: f64,
        gain: f64,
        bound: f64,
        /// No mass moved; only the measured ratios are meaningful.
        degenerate: bool,
        tail: Option<TailCheck>,
    },
    /// A profitable deviation: the profile is not an equilibrium.
    DeviationWitness {
        i_star: usize,
        scheme: SchemeDraft,
        gain: f64,
    },
    InapplicableProfileNotNe { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoACertificate {
    #[serde(flatten)]
    pub case: CertificateCase,
    pub params: CertParams,
    pub cuts: QuantileCutResult,
    pub classification: Classification,
    pub contributions: Vec<f64>,
    /// Equilibrium welfare, `Σ c_i` (exact).
    pub welfare: f64,
    pub first_best: Estimate,
    /// `first_best / welfare`.
    pub measured_ratio: f64,
    /// `sw_prime / welfare`.
    pub sw_prime_ratio: f64,
    /// `max(case-1 bound, case-2 bound)`.
    pub overall_bound: f64,
}

impl PoACertificate {
    pub fn is_witness(&self) -> bool {
        matches!(self.case, CertificateCase::DeviationWitness { .. })
    }

    pub fn bound(&self) -> Option<f64> {
        match self.case {
            CertificateCase::Case1 { bound } => Some(bound),
            CertificateCase::Case2 { bound, .. } => Some(bound),
            _ => None,
        }
    }
}

/// Quantities shared by the continuous and grid pipelines.
pub(crate) struct Pipeline<'a> {
    pub instance: &'a Instance,
    pub profile: &'a StrategyProfile,
    pub params: CertParams,
    /// Cuts driving classification and the deviation signal.
    pub cuts: QuantileCutResult,
    /// Untruncated tail means, used for the large/small split.
    pub original_e: Vec<f64>,
    pub case1_bound: f64,
    pub mode: EvalMode,
    /// An empty `n2` yields a vacuous first case instead of an error.
    pub allow_empty_n2: bool,
}

impl Pipeline<'_> {
    pub fn run(self) -> Result<PoACertificate> {
        let Pipeline {
            instance,
            profile,
            params,
            cuts,
            original_e,
            case1_bound,
            mode,
            allow_empty_n2,
        } = self;
        let case2_bound = params.case2_bound();
        let classification = split(instance, profile, &cuts, &params);
        if classification.n2.is_empty() && !allow_empty_n2 {
            return Err(empty_n2());
        }
        let c = contributions(instance, profile);
        let welfare: f64 = c.iter().sum();
        let fb = first_best(instance, mode)?;

        let small: Vec<usize> = classification
            .n2
            .iter()
            .copied()
            .filter(|&i| c[i] < cuts.e[i] * params.beta * cuts.q[i])
            .collect();
        let i_star = small.iter().copied().min_by(|&a, &b| {
            let ra = c[a] / (cuts.e[a] * cuts.q[a]);
            let rb = c[b] / (cuts.e[b] * cuts.q[b]);
            ra.total_cmp(&rb)
        });

        let case = match i_star {
            None => CertificateCase::Case1 { bound: case1_bound },
            Some(i_star) => {
                let dev = construct_deviation_signal(instance, profile, i_star, &cuts, &params)?;
                let analysis = deviation_analysis(instance, profile, &dev);
                let s_star_floor = cuts.e[i_star] * params.s_star_factor();
                if dev.degenerate {
                    CertificateCase::Case2 {
                        i_star,
                        s_star_mean: dev.s_star_mean,
                        s_star_mass: dev.s_star_mass,
                        s_star_floor,
                        s_star_win: analysis.s_star_win,
                        gain: analysis.gain,
                        bound: case2_bound,
                        degenerate: true,
                        tail: None,
                    }
                } else if analysis.profitable {
                    CertificateCase::DeviationWitness {
                        i_star,
                        scheme: dev.draft(),
                        gain: analysis.gain,
                    }
                } else if analysis.s_star_win >= params.tau {
                    CertificateCase::InapplicableProfileNotNe {
                        reason: format!(
                            "deviation signal of agent {i_star} is selected with probability {} >= tau \
                             yet the deviation gains {}",
                            analysis.s_star_win, analysis.gain
                        ),
                    }
                } else {
                    let (large, small_set): (Vec<usize>, Vec<usize>) = (0..instance.n())
                        .partition(|&i| original_e[i] > original_e[i_star] + TOL);
                    if large.len() >= instance.k() {
                        return Err(Error::InternalInvariant(format!(
                            "{} agents have tail means above the deviating agent's with k = {}",
                            large.len(),
                            instance.k()
                        )));
                    }
                    let order = instance.k() - large.len();
                    let probability =
                        order_statistic_tail(profile, &small_set, order, dev.s_star_mean);
                    CertificateCase::Case2 {
                        i_star,
                        s_star_mean: dev.s_star_mean,
                        s_star_mass: dev.s_star_mass,
                        s_star_floor,
                        s_star_win: analysis.s_star_win,
                        gain: analysis.gain,
                        bound: case2_bound,
                        degenerate: false,
                        tail: Some(TailCheck {
                            large,
                            small: small_set,
                            order,
                            threshold: dev.s_star_mean,
                            probability,
                            required: 1.0 - params.tau,
                            holds: probability >= 1.0 - params.tau - TOL,
                            method: Method::Exact,
                        }),
                    }
                }
            }
        };
        let ratio = |x: f64| if welfare > 0.0 { x / welfare } else { f64::INFINITY };
        Ok(PoACertificate {
            case,
            params,
            measured_ratio: ratio(fb.value),
            sw_prime_ratio: ratio(cuts.sw_prime),
            overall_bound: case1_bound.max(case2_bound),
            cuts,
            classification,
            contributions: c,
            welfare,
            first_best: fb,
        })
    }
}

/// Runs the two-case argument on a concrete profile.
pub fn certify_poa(
    instance: &Instance,
    profile: &StrategyProfile,
    params: CertParams,
    mode: EvalMode,
) -> Result<PoACertificate> {
    let cuts = quantile_cuts(instance);
    Pipeline {
        instance,
        profile,
        params,
        original_e: cuts.e.clone(),
        cuts,
        case1_bound: params.case1_bound(),
        mode,
        allow_empty_n2: false,
    }
    .run()
}
