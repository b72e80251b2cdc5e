use serde::{Deserialize, Serialize};

use super::Prior;
use crate::{Error, Result, MASS_EPS, TOL};

/// A signaling scheme as written by a user: per signal, `(atom, mass)` pairs.
pub type SchemeDraft = Vec<Vec<(usize, f64)>>;

/// Mass-weighted average of atom values over a composition.
pub fn posterior_mean(prior: &Prior, composition: &[(usize, f64)]) -> Result<f64> {
    let mut total = 0.0;
    let mut weighted = 0.0;
    for &(atom, alloc) in composition {
        if atom >= prior.len() {
            return Err(Error::InvalidScheme(format!("atom index {atom} out of range")));
        }
        let mass = prior.mass(atom);
        if alloc > mass + TOL {
            return Err(Error::AllocationExceedsPrior {
                atom,
                allocated: alloc,
                mass,
            });
        }
        total += alloc;
        weighted += alloc * prior.value(atom);
    }
    if total <= MASS_EPS {
        return Err(Error::ZeroMass);
    }
    Ok(weighted / total)
}

/// One signal: how much of each prior atom is mapped to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    alloc: Vec<f64>,
    total_mass: f64,
    posterior_mean: f64,
}

impl Signal {
    fn from_dense(prior: &Prior, alloc: Vec<f64>) -> Self {
        let total_mass: f64 = alloc.iter().sum();
        let weighted: f64 = alloc
            .iter()
            .zip(prior.atoms())
            .map(|(m, a)| m * a.value)
            .sum();
        Self {
            alloc,
            total_mass,
            posterior_mean: weighted / total_mass,
        }
    }

    /// Dense allocation vector indexed by atom.
    pub fn alloc(&self) -> &[f64] {
        &self.alloc
    }

    /// Non-zero `(atom, mass)` pairs.
    pub fn composition(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.alloc
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, m)| m > 0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn posterior_mean(&self) -> f64 {
        self.posterior_mean
    }

    /// `Σ_a alloc_a · f(v_a)`, for example the unnormalised expected utility.
    pub fn weighted_sum(&self, prior: &Prior, f: impl Fn(f64) -> f64) -> f64 {
        self.alloc
            .iter()
            .zip(prior.atoms())
            .map(|(m, a)| if *m > 0.0 { m * f(a.value) } else { 0.0 })
            .sum()
    }
}

/// A single violation found by [`validate_scheme`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    AtomOutOfRange { signal: usize, atom: usize },
    NegativeAllocation { signal: usize, atom: usize, allocated: f64 },
    AllocationExceedsPrior { signal: usize, atom: usize, allocated: f64, mass: f64 },
    NotPlausible { atom: usize, allocated: f64, mass: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks Bayes plausibility and per-signal allocation bounds, listing every
/// violation rather than stopping at the first.
pub fn validate_scheme(prior: &Prior, draft: &SchemeDraft) -> ValidationReport {
    let mut violations = Vec::new();
    let mut per_atom = vec![0.0; prior.len()];
    for (signal, comp) in draft.iter().enumerate() {
        for &(atom, allocated) in comp {
            if atom >= prior.len() {
                violations.push(Violation::AtomOutOfRange { signal, atom });
                continue;
            }
            if allocated < 0.0 {
                violations.push(Violation::NegativeAllocation { signal, atom, allocated });
            }
            let mass = prior.mass(atom);
            if allocated > mass + TOL {
                violations.push(Violation::AllocationExceedsPrior {
                    signal,
                    atom,
                    allocated,
                    mass,
                });
            }
            per_atom[atom] += allocated;
        }
    }
    for (atom, &allocated) in per_atom.iter().enumerate() {
        let mass = prior.mass(atom);
        if (allocated - mass).abs() > TOL {
            violations.push(Violation::NotPlausible { atom, allocated, mass });
        }
    }
    ValidationReport { violations }
}

/// A Bayes-plausible signaling scheme over a fixed prior.
///
/// Signals are kept sorted by posterior mean; signals whose means agree within
/// [`TOL`] are merged and signals lighter than [`MASS_EPS`] are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalingScheme {
    signals: Vec<Signal>,
}

impl SignalingScheme {
    pub fn from_draft(prior: &Prior, draft: &SchemeDraft) -> Result<Self> {
        let report = validate_scheme(prior, draft);
        if let Some(v) = report.violations.first() {
            return Err(match *v {
                Violation::AllocationExceedsPrior {
                    atom,
                    allocated,
                    mass,
                    ..
                } => Error::AllocationExceedsPrior {
                    atom,
                    allocated,
                    mass,
                },
                ref other => Error::InvalidScheme(format!("{other:?}")),
            });
        }
        let dense = draft
            .iter()
            .map(|comp| {
                let mut alloc = vec![0.0; prior.len()];
                for &(atom, m) in comp {
                    alloc[atom] += m;
                }
                alloc
            })
            .collect();
        Ok(Self::canonical(prior, dense))
    }

    /// Builds from dense per-signal allocation vectors (one entry per atom).
    pub fn from_allocations(prior: &Prior, allocs: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(bad) = allocs.iter().find(|a| a.len() != prior.len()) {
            return Err(Error::InvalidScheme(format!(
                "allocation has {} entries for a prior with {} atoms",
                bad.len(),
                prior.len()
            )));
        }
        let draft: SchemeDraft = allocs
            .iter()
            .map(|a| a.iter().copied().enumerate().filter(|&(_, m)| m != 0.0).collect())
            .collect();
        let report = validate_scheme(prior, &draft);
        if !report.is_valid() {
            return Self::from_draft(prior, &draft);
        }
        Ok(Self::canonical(prior, allocs))
    }

    fn canonical(prior: &Prior, allocs: Vec<Vec<f64>>) -> Self {
        let mut signals: Vec<Signal> = allocs
            .into_iter()
            .filter(|a| a.iter().sum::<f64>() >= MASS_EPS)
            .map(|a| Signal::from_dense(prior, a))
            .collect();
        signals.sort_by(|a, b| a.posterior_mean.total_cmp(&b.posterior_mean));
        let mut merged: Vec<Signal> = Vec::with_capacity(signals.len());
        for s in signals {
            match merged.last_mut() {
                Some(last) if (s.posterior_mean - last.posterior_mean).abs() <= TOL => {
                    let alloc = last.alloc.iter().zip(&s.alloc).map(|(a, b)| a + b).collect();
                    *last = Signal::from_dense(prior, alloc);
                }
                _ => merged.push(s),
            }
        }
        Self { signals: merged }
    }

    /// One signal carrying the whole prior.
    pub fn pooling(prior: &Prior) -> Self {
        Self::canonical(prior, vec![prior.atoms().iter().map(|a| a.mass).collect()])
    }

    /// One signal per atom.
    pub fn full_revelation(prior: &Prior) -> Self {
        let n = prior.len();
        let allocs = (0..n)
            .map(|i| {
                let mut a = vec![0.0; n];
                a[i] = prior.mass(i);
                a
            })
            .collect();
        Self::canonical(prior, allocs)
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn atom_count(&self) -> usize {
        self.signals.first().map(|s| s.alloc.len()).unwrap_or(0)
    }

    pub fn means(&self) -> Vec<f64> {
        self.signals.iter().map(|s| s.posterior_mean).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.signals.iter().map(|s| s.total_mass).collect()
    }

    /// `Σ_s mass_s · mean_s`; equals the prior mean for a plausible scheme.
    pub fn mean_of_means(&self) -> f64 {
        self.signals
            .iter()
            .map(|s| s.total_mass * s.posterior_mean)
            .sum()
    }

    pub fn to_draft(&self) -> SchemeDraft {
        self.signals
            .iter()
            .map(|s| s.composition().collect())
            .collect()
    }

    /// Whether every allocation is an integer multiple of `epsilon`.
    pub fn in_grain_space(&self, epsilon: f64) -> bool {
        self.signals.iter().all(|s| {
            s.alloc.iter().all(|&m| {
                let grains = (m / epsilon).round();
                (m - grains * epsilon).abs() <= TOL
            })
        })
    }

    /// Checks that the scheme is plausible for `prior` (used when a scheme
    /// is paired with a prior it was not built from).
    pub fn check_against(&self, prior: &Prior) -> Result<()> {
        if self.atom_count() != prior.len() {
            return Err(Error::InvalidScheme(format!(
                "scheme has {} atoms, prior has {}",
                self.atom_count(),
                prior.len()
            )));
        }
        let report = validate_scheme(prior, &self.to_draft());
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidScheme(format!("{v:?}"))),
        }
    }
}
