use serde::Serialize;

use crate::model::Instance;

/// Bisection steps for the cut threshold.
const BISECTION_STEPS: usize = 200;

/// A crossing of `Σ q_i = k` closer than this is accepted without repair.
const SUM_TOL: f64 = 1e-9;

/// Common tail-mean threshold `E_cut` with per-agent top quantiles `q_i`
/// summing to `k` and their conditional tail means `E_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantileCutResult {
    pub e_cut: f64,
    pub q: Vec<f64>,
    pub e: Vec<f64>,
    /// `E_cut·k + Σ E_i·q_i`, an upper bound on first-best welfare.
    pub sw_prime: f64,
    /// Whether `Σ q_i` jumped across `k` at a shared top atom and the
    /// quantiles of the agents owning that atom were reduced.
    pub repaired: bool,
}

impl QuantileCutResult {
    fn assemble(instance: &Instance, e_cut: f64, q: Vec<f64>, repaired: bool) -> Self {
        let e: Vec<f64> = q
            .iter()
            .zip(instance.priors())
            .map(|(&qi, p)| if qi >= 1.0 { p.mean().max(e_cut) } else { e_cut })
            .collect();
        let sw_prime = e_cut * instance.k() as f64 + e.iter().zip(&q).map(|(e, q)| e * q).sum::<f64>();
        Self {
            e_cut,
            q,
            e,
            sw_prime,
            repaired,
        }
    }

    /// Quantiles truncated to the grid, `q̂_i = ⌊q_i/ε⌋·ε`, with tail means
    /// `Ê_i` at the truncated quantile (`E_cut` when `q̂_i = 0`).
    pub fn truncated(&self, instance: &Instance, epsilon: f64) -> Self {
        let q: Vec<f64> = self
            .q
            .iter()
            .map(|&qi| ((qi / epsilon + 1e-9).floor() * epsilon).min(1.0))
            .collect();
        let e: Vec<f64> = q
            .iter()
            .zip(instance.priors())
            .map(|(&qi, p)| p.tail_mean(qi).unwrap_or(self.e_cut).max(self.e_cut))
            .collect();
        let sw_prime =
            self.e_cut * instance.k() as f64 + e.iter().zip(&q).map(|(e, q)| e * q).sum::<f64>();
        Self {
            e_cut: self.e_cut,
            q,
            e,
            sw_prime,
            repaired: self.repaired,
        }
    }
}

fn quantiles(instance: &Instance, threshold: f64) -> Vec<f64> {
    instance
        .priors()
        .iter()
        .map(|p| p.quantile_cut(threshold))
        .collect()
}

/// Sweeps the threshold down until the agents' top quantiles hold `k` units
/// of mass.
///
/// `Σ q_i(E)` is non-increasing and continuous except where `E` passes an
/// agent's top atom value, where `q_i` jumps from `0` to that atom's mass. If
/// the crossing sits on such a jump, `E_cut` is the atom value and the
/// excess is removed from the owning agents in ascending index order.
pub fn quantile_cuts(instance: &Instance) -> QuantileCutResult {
    let k = instance.k() as f64;
    let mut lo = instance
        .priors()
        .iter()
        .map(|p| p.min_value())
        .fold(0.0, f64::min);
    let mut hi = instance
        .priors()
        .iter()
        .map(|p| p.max_value())
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if quantiles(instance, mid).iter().sum::<f64>() >= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = quantiles(instance, lo);
    if q.iter().sum::<f64>() - k <= SUM_TOL {
        return QuantileCutResult::assemble(instance, lo, q, false);
    }
    let e_cut = instance
        .priors()
        .iter()
        .map(|p| p.max_value())
        .min_by(|a, b| (a - lo).abs().total_cmp(&(b - lo).abs()))
        .expect("instance has agents");
    let mut q = quantiles(instance, e_cut);
    let mut excess = q.iter().sum::<f64>() - k;
    for (qi, p) in q.iter_mut().zip(instance.priors()) {
        if excess <= 0.0 {
            break;
        }
        if p.max_value() == e_cut {
            let cut = qi.min(excess);
            *qi -= cut;
            excess -= cut;
        }
    }
    QuantileCutResult::assemble(instance, e_cut, q, true)
}

/// The welfare upper bound `E_cut·k + Σ E_i·q_i`.
pub fn sw_prime_upper(cuts: &QuantileCutResult) -> f64 {
    cuts.sw_prime
}
