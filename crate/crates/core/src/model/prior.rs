use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One support point of a finite prior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueAtom {
    pub value: f64,
    pub mass: f64,
}

/// Finite-support value distribution of one agent.
///
/// Atoms are sorted by strictly increasing value and their masses sum to one.
/// Values normally lie in `[0, 1]`; [`Prior::new_unbounded`] lifts that
/// restriction for welfare-only experiments (negative-value instances).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    atoms: Vec<ValueAtom>,
}

const MASS_SUM_TOL: f64 = 1e-12;

impl Prior {
    /// Builds a prior from `(value, mass)` pairs in any order.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let prior = Self::new_unbounded(atoms)?;
        if let Some(a) = prior
            .atoms
            .iter()
            .find(|a| !(0.0..=1.0).contains(&a.value))
        {
            return Err(Error::InvalidPrior(format!(
                "value {} outside [0, 1]",
                a.value
            )));
        }
        Ok(prior)
    }

    /// Like [`Prior::new`] but accepts any finite value.
    pub fn new_unbounded(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<ValueAtom> = atoms
            .into_iter()
            .map(|(value, mass)| ValueAtom { value, mass })
            .collect();
        if atoms.is_empty() {
            return Err(Error::InvalidPrior("no atoms".into()));
        }
        for a in &atoms {
            if !a.value.is_finite() {
                return Err(Error::InvalidPrior(format!("non-finite value {}", a.value)));
            }
            if !(a.mass > 0.0 && a.mass <= 1.0 + MASS_SUM_TOL) {
                return Err(Error::InvalidPrior(format!(
                    "mass {} of value {} not in (0, 1]",
                    a.mass, a.value
                )));
            }
        }
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        if atoms.windows(2).any(|w| w[0].value == w[1].value) {
            return Err(Error::InvalidPrior("duplicate atom values".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::InvalidPrior(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn point(value: f64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    /// Bernoulli prior on `{0, 1}` with success probability `zeta`.
    pub fn bernoulli(zeta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::InvalidPrior(format!("zeta {zeta} not in [0, 1]")));
        }
        let atoms = [(0.0, 1.0 - zeta), (1.0, zeta)]
            .into_iter()
            .filter(|&(_, m)| m > 0.0);
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[ValueAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn value(&self, atom: usize) -> f64 {
        self.atoms[atom].value
    }

    pub fn mass(&self, atom: usize) -> f64 {
        self.atoms[atom].mass
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.mass).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.atoms.last().map(|a| a.value).unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.atoms.first().map(|a| a.value).unwrap_or(0.0)
    }

    pub fn in_unit_interval(&self) -> bool {
        self.atoms.iter().all(|a| (0.0..=1.0).contains(&a.value))
    }

    /// Same masses, every value moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new_unbounded(self.atoms.iter().map(|a| (a.value + delta, a.mass)))
    }

    /// Mass of each atom lying in the top-`x` quantile; an atom straddling the
    /// cut contributes only its upper part.
    pub fn top_quantile_alloc(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.atoms.len()];
        let mut left = x.clamp(0.0, 1.0);
        for (idx, atom) in self.atoms.iter().enumerate().rev() {
            if left <= 0.0 {
                break;
            }
            let take = atom.mass.min(left);
            out[idx] = take;
            left -= take;
        }
        out
    }

    /// `∫_{1-x}^{1} v(q) dq`: total value carried by the top-`x` quantile.
    pub fn tail_sum(&self, x: f64) -> f64 {
        self.top_quantile_alloc(x)
            .iter()
            .zip(&self.atoms)
            .map(|(m, a)| m * a.value)
            .sum()
    }

    /// Conditional mean of the top-`x` quantile; `None` for `x = 0`.
    pub fn tail_mean(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return None;
        }
        let x = x.min(1.0);
        Some(self.tail_sum(x) / x)
    }

    /// Largest `x ∈ [0, 1]` whose top-`x` tail mean is at least `threshold`.
    ///
    /// `x ↦ tail_sum(x) − threshold·x` is concave and zero at the origin, so
    /// the feasible set is an interval `[0, q]`; the crossing is found exactly
    /// on the linear piece where it occurs.
    pub fn quantile_cut(&self, threshold: f64) -> f64 {
        if threshold <= self.min_value().min(0.0) {
            return 1.0;
        }
        let mut cum_mass = 0.0;
        let mut cum_sum = 0.0;
        for atom in self.atoms.iter().rev() {
            if atom.value >= threshold {
                cum_mass += atom.mass;
                cum_sum += atom.value * atom.mass;
                continue;
            }
            let slack = cum_sum - threshold * cum_mass;
            let end = slack + (atom.value - threshold) * atom.mass;
            if end >= 0.0 {
                cum_mass += atom.mass;
                cum_sum += atom.value * atom.mass;
                continue;
            }
            let x = cum_mass + slack.max(0.0) / (threshold - atom.value);
            return x.min(1.0);
        }
        1.0
    }

    pub(crate) fn approx_eq(&self, other: &Prior, tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| (a.value - b.value).abs() <= tol && (a.mass - b.mass).abs() <= tol)
    }
}
