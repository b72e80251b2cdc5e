//! Selection under multiplicative observation noise: the principal ranks
//! `y_i = m_i·ξ_i` with `ξ_i` i.i.d. uniform on `[1−η, 1+η]`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certify::golden_bound;
use crate::mc::{self, Categorical, McConfig};
use crate::model::{selection_probabilities, Estimate, Instance, Method, StrategyProfile};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub eta: f64,
    /// Lower end of every prior's support; must be positive.
    pub v_lower: f64,
    pub samples: u64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(eta: f64, v_lower: f64, samples: u64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::SpecViolation(format!("eta {eta} not in [0, 1)")));
        }
        if v_lower <= 0.0 {
            return Err(Error::SpecViolation(format!("v_lower {v_lower} must be positive")));
        }
        Ok(Self {
            eta,
            v_lower,
            samples,
            seed,
        })
    }

    /// Uses the smallest atom value of the instance as `v_lower`.
    pub fn for_instance(instance: &Instance, eta: f64, samples: u64, seed: u64) -> Result<Self> {
        let v_lower = instance
            .priors()
            .iter()
            .map(|p| p.min_value())
            .fold(f64::INFINITY, f64::min);
        Self::new(eta, v_lower, samples, seed)
    }

    fn check(&self, instance: &Instance) -> Result<()> {
        match instance
            .priors()
            .iter()
            .find(|p| p.min_value() < self.v_lower)
        {
            Some(p) => Err(Error::SpecViolation(format!(
                "prior value {} below v_lower {}",
                p.min_value(),
                self.v_lower
            ))),
            None => Ok(()),
        }
    }

    fn mc(&self) -> McConfig {
        McConfig::new(self.samples, self.seed)
    }

    fn method(&self) -> Method {
        Method::MonteCarlo {
            samples: self.samples,
            seed: self.seed,
        }
    }
}

fn draw_noise<R: Rng + ?Sized>(rng: &mut R, eta: f64) -> f64 {
    if eta == 0.0 {
        1.0
    } else {
        rng.random_range(1.0 - eta..=1.0 + eta)
    }
}

/// One noisy selection: indices of the `k` agents chosen.
pub fn noisy_selection_sample<R: Rng + ?Sized>(means: &[f64], k: usize, eta: f64, rng: &mut R) -> Result<Vec<usize>> {
    let observed: Vec<f64> = means.iter().map(|m| m * draw_noise(rng, eta)).collect();
    let rho = selection_probabilities(&observed, k)?.rho;
    let mut selected: Vec<usize> = (0..means.len()).filter(|&i| rho[i] == 1.0).collect();
    let tied: Vec<usize> = (0..means.len()).filter(|&i| rho[i] > 0.0 && rho[i] < 1.0).collect();
    let missing = k - selected.len();
    if missing > 0 {
        selected.extend(sample(rng, tied.len(), missing).into_iter().map(|j| tied[j]));
        selected.sort_unstable();
    }
    Ok(selected)
}

/// Selection probabilities of one draw of signals and noise, averaged over
/// the tie-break.
fn draw_rho<R: Rng + ?Sized>(
    profile: &StrategyProfile,
    samplers: &[Categorical],
    k: usize,
    eta: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<f64>) {
    let picks: Vec<usize> = samplers.iter().map(|s| s.sample(rng)).collect();
    let observed: Vec<f64> = picks
        .iter()
        .enumerate()
        .map(|(i, &s)| profile.scheme(i).signals()[s].posterior_mean() * draw_noise(rng, eta))
        .collect();
    let rho = selection_probabilities(&observed, k).expect("k validated by instance").rho;
    (picks, rho)
}

fn samplers(profile: &StrategyProfile) -> Vec<Categorical> {
    profile
        .schemes()
        .iter()
        .map(|s| Categorical::new(s.masses()))
        .collect()
}

/// Monte Carlo expected utility of agent `i`; the utility of each drawn
/// signal is replaced by its conditional mean given the signal.
pub fn noisy_expected_utility(
    instance: &Instance,
    profile: &StrategyProfile,
    i: usize,
    noise: NoiseSpec,
) -> Result<Estimate> {
    noise.check(instance)?;
    if instance.n() == instance.k() {
        return Ok(Estimate {
            value: instance.full_utility(i),
            std_err: Some(0.0),
            method: noise.method(),
        });
    }
    let prior = instance.prior(i);
    let u = instance.utility(i);
    let signal_utility: Vec<f64> = profile
        .scheme(i)
        .signals()
        .iter()
        .map(|s| s.weighted_sum(prior, |v| u.eval(v)) / s.total_mass())
        .collect();
    let samplers = samplers(profile);
    let m = mc::estimate(noise.mc(), 1, |rng, out| {
        let (picks, rho) = draw_rho(profile, &samplers, instance.k(), noise.eta, rng);
        out[0] = rho[i] * signal_utility[picks[i]];
    });
    Ok(Estimate {
        value: m.mean[0],
        std_err: Some(m.std_err[0]),
        method: noise.method(),
    })
}

/// Monte Carlo expected sum of the selected agents' posterior means.
pub fn noisy_expected_welfare(
    instance: &Instance,
    profile: &StrategyProfile,
    noise: NoiseSpec,
) -> Result<Estimate> {
    noise.check(instance)?;
    if instance.n() == instance.k() {
        return Ok(Estimate {
            value: instance.priors().iter().map(|p| p.mean()).sum(),
            std_err: Some(0.0),
            method: noise.method(),
        });
    }
    let samplers = samplers(profile);
    let m = mc::estimate(noise.mc(), 1, |rng, out| {
        let (picks, rho) = draw_rho(profile, &samplers, instance.k(), noise.eta, rng);
        out[0] = picks
            .iter()
            .enumerate()
            .map(|(j, &s)| rho[j] * profile.scheme(j).signals()[s].posterior_mean())
            .sum();
    });
    Ok(Estimate {
        value: m.mean[0],
        std_err: Some(m.std_err[0]),
        method: noise.method(),
    })
}

/// `(11 + 5√5)·((1+η)/(1−η))²`.
pub fn noisy_bound(eta: f64) -> f64 {
    let r = (1.0 + eta) / (1.0 - eta);
    golden_bound() * r * r
}
