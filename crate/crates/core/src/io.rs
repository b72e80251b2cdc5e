//! JSON formats for instances and profiles.
//!
//! Reals are written as decimal strings (shortest round-trip form) so files
//! reload bit-exactly; plain JSON numbers are accepted on input.
//!
//! ```json
//! { "k": 1, "agents": [ { "prior": [["0", "0.5"], ["1", "0.5"]],
//!                         "utility": [["0", "1"], ["1", "1"]] } ] }
//! ```
//!
//! A profile lists, per agent, its signals as `[atom_index, "mass"]` pairs:
//!
//! ```json
//! { "agents": [ [ [[0, "0.5"], [1, "0.5"]] ] ] }
//! ```

use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{Instance, Prior, SignalingScheme, StrategyProfile, UtilityFn};
use crate::{Error, Result};

/// A real serialized as a decimal string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dec(pub f64);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct DecVisitor;
        impl Visitor<'_> for DecVisitor {
            type Value = Dec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a decimal string or number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Dec, E> {
                v.trim().parse().map(Dec).map_err(|_| E::custom(format!("bad decimal {v:?}")))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Dec, E> {
                Ok(Dec(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Dec, E> {
                Ok(Dec(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Dec, E> {
                Ok(Dec(v as f64))
            }
        }
        d.deserialize_any(DecVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentJson {
    pub prior: Vec<(Dec, Dec)>,
    pub utility: Vec<(Dec, Dec)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub k: usize,
    pub agents: Vec<AgentJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileJson {
    pub agents: Vec<Vec<Vec<(usize, Dec)>>>,
}

impl InstanceJson {
    pub fn from_instance(instance: &Instance) -> Self {
        let agents = instance
            .priors()
            .iter()
            .zip(instance.utilities())
            .map(|(p, u)| AgentJson {
                prior: p.atoms().iter().map(|a| (Dec(a.value), Dec(a.mass))).collect(),
                utility: u.breakpoints().iter().map(|&(v, x)| (Dec(v), Dec(x))).collect(),
            })
            .collect();
        Self {
            k: instance.k(),
            agents,
        }
    }

    /// Builds the instance; values outside `[0, 1]` are accepted only when
    /// `allow_unbounded` is set.
    pub fn to_instance(&self, allow_unbounded: bool) -> Result<Instance> {
        let mut priors = Vec::with_capacity(self.agents.len());
        let mut utilities = Vec::with_capacity(self.agents.len());
        for agent in &self.agents {
            let atoms = agent.prior.iter().map(|&(v, m)| (v.0, m.0));
            priors.push(if allow_unbounded {
                Prior::new_unbounded(atoms)?
            } else {
                Prior::new(atoms)?
            });
            utilities.push(UtilityFn::new(agent.utility.iter().map(|&(v, u)| (v.0, u.0)).collect())?);
        }
        Instance::new(priors, utilities, self.k)
    }
}

impl ProfileJson {
    pub fn from_profile(profile: &StrategyProfile) -> Self {
        Self {
            agents: profile
                .schemes()
                .iter()
                .map(|s| {
                    s.to_draft()
                        .into_iter()
                        .map(|sig| sig.into_iter().map(|(a, m)| (a, Dec(m))).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_profile(&self, instance: &Instance) -> Result<StrategyProfile> {
        if self.agents.len() != instance.n() {
            return Err(Error::InvalidInstance(format!(
                "profile has {} agents, instance has {}",
                self.agents.len(),
                instance.n()
            )));
        }
        let schemes = self
            .agents
            .iter()
            .zip(instance.priors())
            .map(|(signals, prior)| {
                let draft = signals
                    .iter()
                    .map(|sig| sig.iter().map(|&(a, m)| (a, m.0)).collect())
                    .collect();
                SignalingScheme::from_draft(prior, &draft)
            })
            .collect::<Result<_>>()?;
        StrategyProfile::new(instance, schemes)
    }
}

pub fn instance_to_string(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceJson::from_instance(instance)).expect("serializable")
}

pub fn instance_from_str(s: &str, allow_unbounded: bool) -> Result<Instance> {
    serde_json::from_str::<InstanceJson>(s)?.to_instance(allow_unbounded)
}

pub fn profile_to_string(profile: &StrategyProfile) -> String {
    serde_json::to_string_pretty(&ProfileJson::from_profile(profile)).expect("serializable")
}

pub fn profile_from_str(s: &str, instance: &Instance) -> Result<StrategyProfile> {
    serde_json::from_str::<ProfileJson>(s)?.to_profile(instance)
}

pub fn read_instance(path: impl AsRef<Path>, allow_unbounded: bool) -> Result<Instance> {
    instance_from_str(&std::fs::read_to_string(path)?, allow_unbounded)
}

pub fn read_profile(path: impl AsRef<Path>, instance: &Instance) -> Result<StrategyProfile> {
    profile_from_str(&std::fs::read_to_string(path)?, instance)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    Ok(std::fs::write(path, instance_to_string(instance) + "\n")?)
}

pub fn write_profile(path: impl AsRef<Path>, profile: &StrategyProfile) -> Result<()> {
    Ok(std::fs::write(path, profile_to_string(profile) + "\n")?)
}
