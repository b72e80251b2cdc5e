use super::{Prior, SignalingScheme, UtilityFn};
use crate::{Error, Result};

/// `N` agents with independent priors and selection utilities, and the
/// number `k` of agents the principal selects.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    priors: Vec<Prior>,
    utilities: Vec<UtilityFn>,
    k: usize,
}

impl Instance {
    pub fn new(priors: Vec<Prior>, utilities: Vec<UtilityFn>, k: usize) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::InvalidInstance("no agents".into()));
        }
        if priors.len() != utilities.len() {
            return Err(Error::InvalidInstance(format!(
                "{} priors but {} utilities",
                priors.len(),
                utilities.len()
            )));
        }
        if k == 0 || k > priors.len() {
            return Err(Error::BadK { k, n: priors.len() });
        }
        Ok(Self {
            priors,
            utilities,
            k,
        })
    }

    /// `n` copies of the same agent.
    pub fn symmetric(prior: Prior, utility: UtilityFn, n: usize, k: usize) -> Result<Self> {
        Self::new(vec![prior; n], vec![utility; n], k)
    }

    /// `n` i.i.d. Bernoulli(`zeta`) agents with constant utility 1.
    pub fn bernoulli(n: usize, zeta: f64, k: usize) -> Result<Self> {
        Self::symmetric(Prior::bernoulli(zeta)?, UtilityFn::constant(1.0)?, n, k)
    }

    pub fn n(&self) -> usize {
        self.priors.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn priors(&self) -> &[Prior] {
        &self.priors
    }

    pub fn prior(&self, i: usize) -> &Prior {
        &self.priors[i]
    }

    pub fn utilities(&self) -> &[UtilityFn] {
        &self.utilities
    }

    pub fn utility(&self, i: usize) -> &UtilityFn {
        &self.utilities[i]
    }

    pub fn in_unit_interval(&self) -> bool {
        self.priors.iter().all(Prior::in_unit_interval)
    }

    /// `E[u_i(v_i)]`: agent `i`'s utility when always selected.
    pub fn full_utility(&self, i: usize) -> f64 {
        let u = &self.utilities[i];
        self.priors[i]
            .atoms()
            .iter()
            .map(|a| a.mass * u.eval(a.value))
            .sum()
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.priors.clone(), self.utilities.clone(), k)
    }
}

/// One scheme per agent, each plausible for that agent's prior.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfile {
    schemes: Vec<SignalingScheme>,
}

impl StrategyProfile {
    pub fn new(instance: &Instance, schemes: Vec<SignalingScheme>) -> Result<Self> {
        if schemes.len() != instance.n() {
            return Err(Error::InvalidInstance(format!(
                "profile has {} schemes for {} agents",
                schemes.len(),
                instance.n()
            )));
        }
        for (scheme, prior) in schemes.iter().zip(instance.priors()) {
            scheme.check_against(prior)?;
        }
        Ok(Self { schemes })
    }

    pub fn pooling(instance: &Instance) -> Self {
        Self {
            schemes: instance.priors().iter().map(SignalingScheme::pooling).collect(),
        }
    }

    pub fn full_revelation(instance: &Instance) -> Self {
        Self {
            schemes: instance
                .priors()
                .iter()
                .map(SignalingScheme::full_revelation)
                .collect(),
        }
    }

    /// Every agent plays `scheme`; only meaningful for symmetric instances.
    pub fn symmetric(instance: &Instance, scheme: SignalingScheme) -> Result<Self> {
        Self::new(instance, vec![scheme; instance.n()])
    }

    pub fn schemes(&self) -> &[SignalingScheme] {
        &self.schemes
    }

    pub fn scheme(&self, i: usize) -> &SignalingScheme {
        &self.schemes[i]
    }

    pub fn n(&self) -> usize {
        self.schemes.len()
    }

    /// The same profile with agent `i` switched to `scheme`.
    pub fn with_scheme(&self, i: usize, scheme: SignalingScheme) -> Self {
        let mut schemes = self.schemes.clone();
        schemes[i] = scheme;
        Self { schemes }
    }

    /// Number of joint signal realizations.
    pub fn outcome_count(&self) -> u128 {
        self.schemes
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }
}
