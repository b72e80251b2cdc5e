use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grains::grain_mean;
use super::{DiscretizationSpec, GrainSpace, GRAIN_CAP};
use crate::mc::chunk_rng;
use crate::model::{Instance, SignalingScheme, StrategyProfile, WinCurve};
use crate::{Error, Result};

/// Default number of local-search restarts.
pub const DEFAULT_RESTARTS: usize = 20;

/// Minimum utility gain that counts as an improvement.
const GAIN_EPS: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BrMode {
    /// Every scheme in the grain space; fails above [`GRAIN_CAP`] grains.
    Exhaustive,
    /// Hill climbing from seeded random partitions.
    LocalSearch { seed: u64, restarts: usize },
    /// Exhaustive within the grain cap, local search beyond it.
    Auto { seed: u64, restarts: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub scheme: SignalingScheme,
    pub utility: f64,
    /// `true` when produced by local search (a local optimum only).
    pub heuristic: bool,
}

/// Utility of grain blocks against a fixed win curve.
struct Scorer<'a> {
    curve: &'a WinCurve,
    space: &'a GrainSpace,
    grain_utility: Vec<f64>,
}

impl<'a> Scorer<'a> {
    fn new(curve: &'a WinCurve, space: &'a GrainSpace, instance: &Instance, i: usize) -> Self {
        let prior = space.prior();
        let u = instance.utility(i);
        let grain_utility = space
            .counts()
            .iter()
            .enumerate()
            .map(|(a, &t)| prior.mass(a) / t as f64 * u.eval(prior.value(a)))
            .collect();
        Self {
            curve,
            space,
            grain_utility,
        }
    }

    fn block(&self, counts: &[usize]) -> f64 {
        let weight: f64 = counts
            .iter()
            .zip(&self.grain_utility)
            .map(|(&c, g)| c as f64 * g)
            .sum();
        if weight == 0.0 {
            return 0.0;
        }
        self.curve.eval(grain_mean(self.space.prior(), counts)) * weight
    }

    fn total(&self, blocks: &[Vec<usize>]) -> f64 {
        blocks.iter().map(|b| self.block(b)).sum()
    }
}

/// Whether `(u, signals)` beats the incumbent under the tie-break rule:
/// a strict gain above [`GAIN_EPS`], else fewer signals.
fn better(u: f64, signals: usize, best_u: f64, best_signals: usize) -> bool {
    u > best_u + GAIN_EPS || (u >= best_u - GAIN_EPS && signals < best_signals)
}

/// Best response of agent `i` within the grain space of `spec`.
pub fn best_response(
    instance: &Instance,
    profile: &StrategyProfile,
    i: usize,
    spec: DiscretizationSpec,
    mode: BrMode,
) -> Result<BestResponse> {
    let space = GrainSpace::new(instance.prior(i), spec)?;
    let curve = WinCurve::for_agent(instance, profile, i);
    let scorer = Scorer::new(&curve, &space, instance, i);
    let (blocks, heuristic) = match mode {
        BrMode::Exhaustive => (exhaustive(&scorer)?, false),
        BrMode::Auto { .. } if space.grains() <= GRAIN_CAP => (exhaustive(&scorer)?, false),
        BrMode::LocalSearch { seed, restarts } | BrMode::Auto { seed, restarts } => {
            (local_search(&scorer, seed, restarts), true)
        }
    };
    let scheme = space.scheme_from_counts(blocks.iter().map(Vec::as_slice));
    let utility = curve.utility_of(&scheme, instance.prior(i), instance.utility(i));
    Ok(BestResponse {
        scheme,
        utility,
        heuristic,
    })
}

fn exhaustive(scorer: &Scorer<'_>) -> Result<Vec<Vec<usize>>> {
    let space = scorer.space;
    if space.grains() > GRAIN_CAP {
        return Err(Error::CapExceeded {
            needed: space.grains() as u128,
            cap: GRAIN_CAP as u128,
        });
    }
    let values: Vec<f64> = space.candidates().iter().map(|c| scorer.block(c)).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for part in space.partitions(space.grains()) {
        let u: f64 = part.iter().map(|&b| values[b]).sum();
        match &best {
            Some((bu, bp)) if !better(u, part.len(), *bu, bp.len()) => {}
            _ => best = Some((u, part)),
        }
    }
    let (_, part) = best.expect("the grain space is never empty");
    Ok(part.iter().map(|&b| space.candidates()[b].clone()).collect())
}

fn local_search(scorer: &Scorer<'_>, seed: u64, restarts: usize) -> Vec<Vec<usize>> {
    let counts = scorer.space.counts().to_vec();
    let grains: usize = counts.iter().sum();
    let results: Vec<(f64, Vec<Vec<usize>>)> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                vec![counts.clone()]
            } else {
                let mut rng = chunk_rng(seed, r);
                let nb = rng.random_range(1..=grains);
                let mut blocks = vec![vec![0usize; counts.len()]; nb];
                for (a, &t) in counts.iter().enumerate() {
                    for _ in 0..t {
                        blocks[rng.random_range(0..nb)][a] += 1;
                    }
                }
                blocks.retain(|b| b.iter().any(|&c| c > 0));
                blocks
            };
            climb(scorer, start)
        })
        .collect();
    let mut best = &results[0];
    for res in &results[1..] {
        if better(res.0, res.1.len(), best.0, best.1.len()) {
            best = res;
        }
    }
    best.1.clone()
}

/// Best-improvement hill climbing over grain transfers, block splits and
/// block merges.
fn climb(scorer: &Scorer<'_>, mut blocks: Vec<Vec<usize>>) -> (f64, Vec<Vec<usize>>) {
    let mut current = scorer.total(&blocks);
    loop {
        let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
        let mut consider = |cand: Vec<Vec<usize>>| {
            let u = scorer.total(&cand);
            let (bu, bn) = best
                .as_ref()
                .map_or((current, blocks.len()), |(u, b)| (*u, b.len()));
            if u > current + GAIN_EPS && better(u, cand.len(), bu, bn) {
                best = Some((u, cand));
            }
        };
        let nb = blocks.len();
        let atoms = blocks[0].len();
        for from in 0..nb {
            for a in 0..atoms {
                if blocks[from][a] == 0 {
                    continue;
                }
                for to in 0..=nb {
                    if to == from {
                        continue;
                    }
                    let mut cand = blocks.clone();
                    cand[from][a] -= 1;
                    if to == nb {
                        let mut fresh = vec![0; atoms];
                        fresh[a] = 1;
                        cand.push(fresh);
                    } else {
                        cand[to][a] += 1;
                    }
                    cand.retain(|b| b.iter().any(|&c| c > 0));
                    consider(cand);
                }
                // Split off every grain of atom `a`.
                if blocks[from][a] > 1 && blocks[from].iter().filter(|&&c| c > 0).count() > 1 {
                    let mut cand = blocks.clone();
                    let mut fresh = vec![0; atoms];
                    fresh[a] = cand[from][a];
                    cand[from][a] = 0;
                    cand.push(fresh);
                    consider(cand);
                }
            }
        }
        for x in 0..nb {
            for y in x + 1..nb {
                let mut cand = blocks.clone();
                let merged: Vec<usize> = cand[x].iter().zip(&cand[y]).map(|(p, q)| p + q).collect();
                cand[x] = merged;
                cand.remove(y);
                consider(cand);
            }
        }
        match best {
            Some((u, b)) => {
                current = u;
                blocks = b;
            }
            None => return (current, blocks),
        }
    }
}
