//! Seeded generators and brute-force oracles shared by the integration tests.
//! The oracles enumerate joint outcomes directly and never call the library's
//! own evaluation code.

#![allow(dead_code)]

use persuasion_poa::model::{Instance, Prior, SignalingScheme, StrategyProfile, UtilityFn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prior with `support` distinct values on a 1/100 grid, each at least
/// `min_value`; masses are multiples of `1/grains` when `grains` is set.
pub fn random_prior(rng: &mut ChaCha8Rng, support: usize, min_value: u32, grains: Option<usize>) -> Prior {
    let mut values: Vec<u32> = Vec::new();
    while values.len() < support {
        let v = rng.random_range(min_value..=100);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    let masses: Vec<f64> = match grains {
        Some(t) => {
            let mut counts = vec![1usize; support];
            for _ in support..t {
                counts[rng.random_range(0..support)] += 1;
            }
            counts.iter().map(|&c| c as f64 / t as f64).collect()
        }
        None => {
            let w: Vec<f64> = (0..support).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        }
    };
    Prior::new(values.iter().map(|&v| v as f64 / 100.0).zip(masses)).unwrap()
}

pub fn random_utility(rng: &mut ChaCha8Rng) -> UtilityFn {
    match rng.random_range(0..3) {
        0 => UtilityFn::constant(1.0).unwrap(),
        1 => UtilityFn::identity(),
        _ => {
            let mut level = rng.random_range(0.1..1.0);
            let mut pts = vec![(0.0, level)];
            for x in [0.3, 0.7, 1.0] {
                level += rng.random_range(0.0..1.0);
                pts.push((x, level));
            }
            UtilityFn::new(pts).unwrap()
        }
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_support: usize, max_k: usize) -> Instance {
    let n = rng.random_range(1..=max_n);
    let k = rng.random_range(1..=max_k.min(n));
    let priors = (0..n)
        .map(|_| {
            let s = rng.random_range(1..=max_support);
            random_prior(rng, s, 0, None)
        })
        .collect();
    let utilities = (0..n).map(|_| random_utility(rng)).collect();
    Instance::new(priors, utilities, k).unwrap()
}

/// Random split of every atom across up to `max_signals` signals.
pub fn random_scheme(rng: &mut ChaCha8Rng, prior: &Prior, max_signals: usize) -> SignalingScheme {
    let s = rng.random_range(1..=max_signals);
    let mut allocs = vec![vec![0.0; prior.len()]; s];
    for (a, atom) in prior.atoms().iter().enumerate() {
        let w: Vec<f64> = (0..s)
            .map(|_| if rng.random_bool(0.4) { 0.0 } else { rng.random_range(0.0..1.0) })
            .collect();
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            allocs[rng.random_range(0..s)][a] = atom.mass;
        } else {
            for j in 0..s {
                allocs[j][a] = atom.mass * w[j] / total;
            }
        }
    }
    SignalingScheme::from_allocations(prior, allocs).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng, instance: &Instance, max_signals: usize) -> StrategyProfile {
    let schemes = instance
        .priors()
        .iter()
        .map(|p| random_scheme(rng, p, max_signals))
        .collect();
    StrategyProfile::new(instance, schemes).unwrap()
}

/// Visits every element of the product of `sizes` with its index vector.
pub fn for_each_outcome(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.iter().any(|&s| s == 0) {
        return;
    }
    let mut idx = vec![0; sizes.len()];
    loop {
        f(&idx);
        let mut d = 0;
        loop {
            if d == sizes.len() {
                return;
            }
            idx[d] += 1;
            if idx[d] < sizes[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Selection probabilities by averaging over every tie-breaking order: the
/// principal sorts by mean, then by a uniformly random priority, and takes
/// the first `k`.
pub fn permutation_selection(means: &[f64], k: usize) -> Vec<f64> {
    let n = means.len();
    let perms = permutations(n);
    let mut rho = vec![0.0; n];
    for perm in &perms {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(perm[a].cmp(&perm[b])));
        for &i in &order[..k] {
            rho[i] += 1.0;
        }
    }
    rho.iter().map(|x| x / perms.len() as f64).collect()
}

/// `E[sum of the k largest values]` by enumerating the value product space.
pub fn oracle_first_best(instance: &Instance) -> f64 {
    let sizes: Vec<usize> = instance.priors().iter().map(|p| p.len()).collect();
    let mut total = 0.0;
    for_each_outcome(&sizes, |idx| {
        let mut prob = 1.0;
        let mut vals = Vec::with_capacity(idx.len());
        for (i, &a) in idx.iter().enumerate() {
            prob *= instance.prior(i).mass(a);
            vals.push(instance.prior(i).value(a));
        }
        vals.sort_by(|a, b| b.total_cmp(a));
        total += prob * vals[..instance.k()].iter().sum::<f64>();
    });
    total
}

/// Welfare and per-agent utilities by enumerating signal profiles and
/// averaging selection over tie-breaking orders.
pub fn oracle_welfare_and_utilities(instance: &Instance, profile: &StrategyProfile) -> (f64, Vec<f64>) {
    let n = instance.n();
    let sizes: Vec<usize> = profile.schemes().iter().map(|s| s.len()).collect();
    let mut welfare = 0.0;
    let mut util = vec![0.0; n];
    for_each_outcome(&sizes, |idx| {
        let mut prob = 1.0;
        let mut means = Vec::with_capacity(n);
        for (i, &s) in idx.iter().enumerate() {
            let sig = &profile.scheme(i).signals()[s];
            prob *= sig.total_mass();
            means.push(sig.posterior_mean());
        }
        let rho = permutation_selection(&means, instance.k());
        for i in 0..n {
            let sig = &profile.scheme(i).signals()[idx[i]];
            let u: f64 = sig
                .alloc()
                .iter()
                .enumerate()
                .map(|(a, m)| m * instance.utility(i).eval(instance.prior(i).value(a)))
                .sum::<f64>()
                / sig.total_mass();
            welfare += prob * rho[i] * means[i];
            util[i] += prob * rho[i] * u;
        }
    });
    (welfare, util)
}

/// Bernoulli(ζ) prior over `{0, 1}` with atom 0 the value 0.
pub fn bernoulli(zeta: f64) -> Prior {
    Prior::new([(0.0, 1.0 - zeta), (1.0, zeta)]).unwrap()
}

/// Shuffled copy, for order-invariance checks.
pub fn shuffled<T: Clone>(rng: &mut ChaCha8Rng, v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.shuffle(rng);
    out
}

pub fn seed_of(rng: &mut ChaCha8Rng) -> u64 {
    rng.random()
}
