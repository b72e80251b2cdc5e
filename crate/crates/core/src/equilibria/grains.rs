use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::{Prior, SignalingScheme};
use crate::{Error, Result, TOL};

/// Largest grain count enumerated exhaustively.
pub const GRAIN_CAP: usize = 12;

/// Step size of the discretized game: prior masses and allocations are
/// integer multiples of `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationSpec {
    pub epsilon: f64,
}

impl DiscretizationSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::SpecViolation(format!("epsilon {epsilon} not in (0, 1]")));
        }
        Ok(Self { epsilon })
    }

    /// Grain count of each atom; fails unless every mass is a multiple of
    /// `epsilon` within [`TOL`].
    pub fn grains(&self, prior: &Prior) -> Result<Vec<usize>> {
        prior
            .atoms()
            .iter()
            .map(|a| {
                let t = (a.mass / self.epsilon).round();
                if (t * self.epsilon - a.mass).abs() > TOL || t < 1.0 {
                    Err(Error::SpecViolation(format!(
                        "mass {} of value {} is not a multiple of epsilon {}",
                        a.mass, a.value, self.epsilon
                    )))
                } else {
                    Ok(t as usize)
                }
            })
            .collect()
    }
}

/// Number of set partitions of `n` labelled items (Bell number).
pub fn count_set_partitions(n: usize) -> u128 {
    // Bell triangle.
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row[0]
}

/// The grain view of one prior: candidate blocks are non-zero count vectors
/// bounded by the atom grain counts, ordered by size so unit blocks come first.
#[derive(Clone, Debug)]
pub struct GrainSpace {
    prior: Prior,
    counts: Vec<usize>,
    candidates: Arc<Vec<Vec<usize>>>,
    means: Vec<f64>,
}

impl GrainSpace {
    pub fn new(prior: &Prior, spec: DiscretizationSpec) -> Result<Self> {
        let counts = spec.grains(prior)?;
        let mut candidates = Vec::new();
        let mut c = vec![0usize; counts.len()];
        loop {
            let mut pos = 0;
            loop {
                if pos == counts.len() {
                    break;
                }
                c[pos] += 1;
                if c[pos] <= counts[pos] {
                    break;
                }
                c[pos] = 0;
                pos += 1;
            }
            if pos == counts.len() {
                break;
            }
            candidates.push(c.clone());
        }
        candidates.sort_by(|a, b| {
            let sa: usize = a.iter().sum();
            let sb: usize = b.iter().sum();
            sa.cmp(&sb).then_with(|| b.cmp(a))
        });
        let means = candidates
            .iter()
            .map(|c| grain_mean(prior, c))
            .collect();
        Ok(Self {
            prior: prior.clone(),
            counts,
            candidates: Arc::new(candidates),
            means,
        })
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn grains(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn candidates(&self) -> &[Vec<usize>] {
        &self.candidates
    }

    /// Posterior mean of candidate block `idx`.
    pub fn candidate_mean(&self, idx: usize) -> f64 {
        self.means[idx]
    }

    /// Every multiset of candidate blocks summing to the grain counts.
    pub fn partitions(&self, max_blocks: usize) -> VectorPartitions {
        VectorPartitions::new(self, max_blocks)
    }

    /// Whether the blocks have pairwise distinct means.
    pub fn distinct_means(&self, blocks: &[usize]) -> bool {
        let mut ms: Vec<f64> = blocks.iter().map(|&b| self.means[b]).collect();
        ms.sort_by(f64::total_cmp);
        ms.windows(2).all(|w| w[1] - w[0] > TOL)
    }

    /// Scheme whose signals are the given count vectors.
    pub fn scheme_from_counts<'a>(&self, blocks: impl IntoIterator<Item = &'a [usize]>) -> SignalingScheme {
        let allocs = blocks
            .into_iter()
            .map(|c| {
                c.iter()
                    .zip(&self.counts)
                    .enumerate()
                    .map(|(a, (&g, &t))| self.prior.mass(a) * g as f64 / t as f64)
                    .collect()
            })
            .collect();
        SignalingScheme::from_allocations(&self.prior, allocs)
            .expect("grain blocks exhaust the prior")
    }

    /// Scheme whose signals are candidate blocks `blocks`.
    pub fn scheme(&self, blocks: &[usize]) -> SignalingScheme {
        self.scheme_from_counts(blocks.iter().map(|&b| self.candidates[b].as_slice()))
    }
}

pub(crate) fn grain_mean(prior: &Prior, counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let weighted: f64 = counts
        .iter()
        .enumerate()
        .map(|(a, &g)| g as f64 * prior.value(a))
        .sum();
    weighted / total as f64
}

/// Lazy enumeration of vector partitions as non-increasing sequences of
/// candidate indices.
pub struct VectorPartitions {
    candidates: Arc<Vec<Vec<usize>>>,
    max_blocks: usize,
    remaining: Vec<usize>,
    chosen: Vec<usize>,
    /// Next candidate index to try at each depth, counting down; `None` once
    /// the depth is exhausted.
    cursor: Vec<Option<usize>>,
    /// The last yield left a block on `chosen` that must be undone.
    pending_pop: bool,
}

impl VectorPartitions {
    fn new(space: &GrainSpace, max_blocks: usize) -> Self {
        let top = space.candidates.len().checked_sub(1);
        Self {
            candidates: Arc::clone(&space.candidates),
            max_blocks,
            remaining: space.counts.clone(),
            chosen: Vec::new(),
            cursor: if max_blocks == 0 { Vec::new() } else { vec![top] },
            pending_pop: false,
        }
    }

    fn fits(&self, idx: usize) -> bool {
        self.candidates[idx]
            .iter()
            .zip(&self.remaining)
            .all(|(c, r)| c <= r)
    }

    fn push(&mut self, idx: usize) {
        for (r, c) in self.remaining.iter_mut().zip(&self.candidates[idx]) {
            *r -= c;
        }
        self.chosen.push(idx);
    }

    fn pop(&mut self) {
        let idx = self.chosen.pop().expect("pop on empty partition");
        for (r, c) in self.remaining.iter_mut().zip(&self.candidates[idx]) {
            *r += c;
        }
    }
}

impl Iterator for VectorPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.pending_pop {
            self.pending_pop = false;
            self.pop();
        }
        while let Some(&cursor) = self.cursor.last() {
            let depth = self.cursor.len() - 1;
            let mut found = None;
            let mut j = cursor;
            while let Some(idx) = j {
                if self.fits(idx) {
                    found = Some(idx);
                    break;
                }
                j = idx.checked_sub(1);
            }
            match found {
                None => {
                    self.cursor.pop();
                    if depth > 0 {
                        self.pop();
                    }
                }
                Some(idx) => {
                    self.cursor[depth] = idx.checked_sub(1);
                    self.push(idx);
                    if self.remaining.iter().all(|&r| r == 0) {
                        self.pending_pop = true;
                        return Some(self.chosen.clone());
                    }
                    if self.chosen.len() < self.max_blocks {
                        self.cursor.push(Some(idx));
                    } else {
                        self.pop();
                    }
                }
            }
        }
        None
    }
}

/// Every distinct discretized scheme of `prior` with at most `max_signals`
/// signals. Partitions with two equal-mean blocks are skipped: merging them
/// gives another partition that is emitted on its own.
pub fn enumerate_discretized_schemes(
    prior: &Prior,
    spec: DiscretizationSpec,
    max_signals: usize,
) -> Result<impl Iterator<Item = SignalingScheme>> {
    let space = GrainSpace::new(prior, spec)?;
    let grains = space.grains();
    if grains > GRAIN_CAP {
        return Err(Error::CapExceeded {
            needed: grains as u128,
            cap: GRAIN_CAP as u128,
        });
    }
    Ok(space
        .partitions(max_signals)
        .filter_map(move |p| space.distinct_means(&p).then(|| space.scheme(&p))))
}
