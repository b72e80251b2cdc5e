use serde::Serialize;

use crate::{Error, Result, TOL};

/// Per-agent selection probabilities for one realized vector of means.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionProbabilities {
    pub rho: Vec<f64>,
}

/// Probability that an agent is selected when `above` opponents have a
/// strictly higher mean and `tied` opponents share its mean.
pub fn own_selection_prob(k: usize, above: usize, tied: usize) -> f64 {
    if above >= k {
        0.0
    } else {
        ((k - above) as f64 / (tied + 1) as f64).min(1.0)
    }
}

/// Top-`k` selection with uniform tie-breaking at the `k`-th position.
///
/// Means within [`TOL`] of the `k`-th largest count as tied with it.
pub fn selection_probabilities(means: &[f64], k: usize) -> Result<SelectionProbabilities> {
    let n = means.len();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut sorted = means.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let cut = sorted[k - 1];
    let winners = means.iter().filter(|&&m| m > cut + TOL).count();
    let tied = means.iter().filter(|&&m| (m - cut).abs() <= TOL).count();
    let share = (k - winners) as f64 / tied as f64;
    let rho = means
        .iter()
        .map(|&m| {
            if m > cut + TOL {
                1.0
            } else if (m - cut).abs() <= TOL {
                share
            } else {
                0.0
            }
        })
        .collect();
    Ok(SelectionProbabilities { rho })
}
