use serde::Serialize;

use super::GAIN_TOL;
use crate::model::{
    contributions, win_probabilities, Instance, SchemeDraft, SignalingScheme, StrategyProfile,
    WinCurve,
};
use crate::{Error, Result, TOL};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WarmupOutcome {
    /// `Pr[M ≥ E_(2/N)] ≥ 1/2`, so welfare is at least a quarter of first best.
    TailCheckPassed,
    /// The tail check failed; the least-selected agent's binary top-quantile
    /// scheme is returned with its gain computed two ways.
    DeviationWitness {
        i_star: usize,
        scheme: SchemeDraft,
        r_i_star: f64,
        /// Utility difference through the win curve.
        gain_direct: f64,
        /// `c·(Σ_s Pr[s]·Pr[win | s] − r_{i*})` through the maximum of the
        /// opponents' means.
        gain_formula: f64,
        /// `c·(Pr[s_1]·Pr[M_{−i*} < E_(2/N)] − r_{i*})`.
        gain_lower_bound: f64,
        profitable: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WarmupCertificate {
    pub n: usize,
    /// Tail mean of the top `1/N` quantile; bounds first-best welfare.
    pub e_top_1_over_n: f64,
    /// Tail mean of the top `2/N` quantile.
    pub e_top_2_over_n: f64,
    /// `E[M]`, the highest posterior mean in expectation.
    pub welfare: f64,
    pub first_best: f64,
    /// `first_best / welfare`.
    pub measured_ratio: f64,
    /// `E_(1/N) / welfare`.
    pub bound_ratio: f64,
    /// `Pr[M ≥ E_(2/N)]`.
    pub tail_probability: f64,
    #[serde(flatten)]
    pub outcome: WarmupOutcome,
}

/// Probability that an agent sending mean `x` is selected when `k = 1`:
/// every opponent at or below `x`, ties shared uniformly.
fn max_win(profile: &StrategyProfile, skip: usize, x: f64) -> f64 {
    // dist[t]: no opponent above and `t` tied.
    let mut dist = vec![1.0];
    for (j, scheme) in profile.schemes().iter().enumerate() {
        if j == skip {
            continue;
        }
        let (mut below, mut tie) = (0.0, 0.0);
        for s in scheme.signals() {
            let m = s.posterior_mean();
            if m < x - TOL {
                below += s.total_mass();
            } else if m <= x + TOL {
                tie += s.total_mass();
            }
        }
        let mut next = vec![0.0; dist.len() + 1];
        for (t, &p) in dist.iter().enumerate() {
            next[t] += p * below;
            next[t + 1] += p * tie;
        }
        dist = next;
    }
    dist.iter()
        .enumerate()
        .map(|(t, p)| p / (t + 1) as f64)
        .sum()
}

/// `Pr[every listed agent sends a mean below x]`.
fn all_below(profile: &StrategyProfile, skip: Option<usize>, x: f64) -> f64 {
    profile
        .schemes()
        .iter()
        .enumerate()
        .filter(|&(j, _)| Some(j) != skip)
        .map(|(_, s)| {
            s.signals()
                .iter()
                .filter(|sig| sig.posterior_mean() < x - TOL)
                .map(|sig| sig.total_mass())
                .sum::<f64>()
        })
        .product()
}

/// The identical-prior, constant-utility, single-selection argument.
pub fn warmup_certify(instance: &Instance, profile: &StrategyProfile) -> Result<WarmupCertificate> {
    let n = instance.n();
    if instance.k() != 1 {
        return Err(Error::WrongRegime(format!("needs k = 1, got {}", instance.k())));
    }
    let prior = instance.prior(0);
    if instance.priors().iter().any(|p| !p.approx_eq(prior, TOL)) {
        return Err(Error::WrongRegime("priors are not identical".into()));
    }
    let constants: Vec<f64> = instance
        .utilities()
        .iter()
        .map(|u| u.as_constant())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::WrongRegime("utilities are not constant".into()))?;

    let frac = |x: f64| x.min(1.0);
    let e1 = prior.tail_mean(frac(1.0 / n as f64)).expect("positive fraction");
    let e2 = prior.tail_mean(frac(2.0 / n as f64)).expect("positive fraction");
    let welfare: f64 = contributions(instance, profile).iter().sum();

    // E[max of N i.i.d. values] from the common CDF.
    let mut cdf = 0.0f64;
    let mut first_best = 0.0;
    for atom in prior.atoms() {
        let next = cdf + atom.mass;
        first_best += atom.value * (next.min(1.0).powi(n as i32) - cdf.powi(n as i32));
        cdf = next;
    }

    let tail_probability = 1.0 - all_below(profile, None, e2);
    let outcome = if tail_probability >= 0.5 - TOL {
        WarmupOutcome::TailCheckPassed
    } else {
        let r = win_probabilities(instance, profile).r;
        let i_star = (0..n)
            .min_by(|&a, &b| r[a].total_cmp(&r[b]))
            .expect("instance has agents");
        let c = constants[i_star];
        let top = prior.top_quantile_alloc(frac(2.0 / n as f64));
        let rest: Vec<f64> = prior
            .atoms()
            .iter()
            .zip(&top)
            .map(|(a, t)| (a.mass - t).max(0.0))
            .collect();
        let binary = SignalingScheme::from_allocations(prior, vec![top.clone(), rest.clone()])?;

        let curve = WinCurve::for_agent(instance, profile, i_star);
        let u = instance.utility(i_star);
        let gain_direct = curve.utility_of(&binary, prior, u) - curve.utility_of(profile.scheme(i_star), prior, u);

        let p1: f64 = top.iter().sum();
        let p2: f64 = rest.iter().sum();
        let mean_of = |alloc: &[f64], mass: f64| {
            alloc.iter().zip(prior.atoms()).map(|(m, a)| m * a.value).sum::<f64>() / mass
        };
        let mut rate = p1 * max_win(profile, i_star, mean_of(&top, p1));
        if p2 > crate::MASS_EPS {
            rate += p2 * max_win(profile, i_star, mean_of(&rest, p2));
        }
        let gain_formula = c * (rate - r[i_star]);
        let gain_lower_bound = c * (p1 * all_below(profile, Some(i_star), e2) - r[i_star]);
        WarmupOutcome::DeviationWitness {
            i_star,
            scheme: binary.to_draft(),
            r_i_star: r[i_star],
            gain_direct,
            gain_formula,
            gain_lower_bound,
            profitable: gain_direct > GAIN_TOL,
        }
    };
    let ratio = |x: f64| if welfare > 0.0 { x / welfare } else { f64::INFINITY };
    Ok(WarmupCertificate {
        n,
        e_top_1_over_n: e1,
        e_top_2_over_n: e2,
        welfare,
        first_best,
        measured_ratio: ratio(first_best),
        bound_ratio: ratio(e1),
        tail_probability,
        outcome,
    })
}
