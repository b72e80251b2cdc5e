use serde::Serialize;

use crate::model::{Instance, Prior, SignalingScheme};
use crate::{Error, Result, TOL};

/// `N` i.i.d. Bernoulli(`zeta`) agents with `N·zeta ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BernoulliEqSpec {
    pub n: usize,
    pub zeta: f64,
}

impl BernoulliEqSpec {
    pub fn new(n: usize, zeta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::SpecViolation("need at least one agent".into()));
        }
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::SpecViolation(format!("zeta {zeta} not in [0, 1]")));
        }
        if n as f64 * zeta > 1.0 + TOL {
            return Err(Error::SpecViolation(format!(
                "N·zeta = {} exceeds 1",
                n as f64 * zeta
            )));
        }
        Ok(Self { n, zeta })
    }

    pub fn p_hat(&self) -> f64 {
        (self.n as f64 * self.zeta).min(1.0)
    }

    /// Constant-utility, `k = 1` instance.
    pub fn instance(&self) -> Result<Instance> {
        Instance::bernoulli(self.n, self.zeta, 1)
    }

    pub fn prior(&self) -> Result<Prior> {
        Prior::bernoulli(self.zeta)
    }

    /// Equilibrium CDF of a single agent's posterior mean, `(v/p̂)^{1/(N−1)}`.
    pub fn cdf(&self, v: f64) -> f64 {
        let p = self.p_hat();
        if v >= p {
            return 1.0;
        }
        if v <= 0.0 {
            return 0.0;
        }
        (v / p).powf(1.0 / (self.n as f64 - 1.0))
    }

    /// `∫_a^b v dG(v)`.
    fn partial_mean(&self, a: f64, b: f64) -> f64 {
        let p = self.p_hat();
        let e = self.n as f64 / (self.n as f64 - 1.0);
        p / self.n as f64 * ((b / p).powf(e) - (a / p).powf(e))
    }

    fn degenerate(&self) -> bool {
        self.n == 1 || self.zeta == 0.0
    }
}

/// Equilibrium scheme whose posterior-mean distribution matches the
/// equilibrium CDF at every boundary of `boundaries`.
///
/// `boundaries` must increase strictly from `0` to `p̂`; each cell becomes one
/// signal carrying the cell's CDF mass at the cell's conditional mean.
pub fn bernoulli_equilibrium_scheme_on_cells(
    spec: BernoulliEqSpec,
    boundaries: &[f64],
) -> Result<SignalingScheme> {
    let prior = spec.prior()?;
    if spec.degenerate() {
        return Ok(SignalingScheme::pooling(&prior));
    }
    let p = spec.p_hat();
    let ok = boundaries.len() >= 2
        && boundaries[0] == 0.0
        && (boundaries[boundaries.len() - 1] - p).abs() <= TOL
        && boundaries.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::SpecViolation(
            "cell boundaries must increase strictly from 0 to p̂".into(),
        ));
    }
    let allocs = boundaries
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1].min(p));
            let mass = spec.cdf(b) - spec.cdf(a);
            let high = spec.partial_mean(a, b);
            prior
                .atoms()
                .iter()
                .map(|atom| if atom.value == 1.0 { high } else { mass - high })
                .collect()
        })
        .collect();
    SignalingScheme::from_allocations(&prior, allocs)
}

/// Equilibrium scheme on `grid` equal cells of `[0, p̂]`.
pub fn bernoulli_equilibrium_scheme(spec: BernoulliEqSpec, grid: usize) -> Result<SignalingScheme> {
    if grid < 2 {
        return Err(Error::SpecViolation("grid needs at least 2 cells".into()));
    }
    let p = spec.p_hat();
    let boundaries: Vec<f64> = (0..=grid).map(|j| p * j as f64 / grid as f64).collect();
    bernoulli_equilibrium_scheme_on_cells(spec, &boundaries)
}

/// Cell boundaries containing every posterior mean an agent can reach with
/// `epsilon`-grains, plus `0` and `p̂`.
///
/// With these cells an opponent's win curve equals `m/p̂` at every reachable
/// mean `m < p̂`, so no grain deviation beats utility `1/N`.
pub fn grain_aligned_boundaries(spec: BernoulliEqSpec, epsilon: f64) -> Result<Vec<f64>> {
    let ones = (spec.zeta / epsilon).round();
    let zeros = ((1.0 - spec.zeta) / epsilon).round();
    if (ones * epsilon - spec.zeta).abs() > TOL || (zeros * epsilon - (1.0 - spec.zeta)).abs() > TOL {
        return Err(Error::SpecViolation(format!(
            "zeta {} is not a multiple of epsilon {epsilon}",
            spec.zeta
        )));
    }
    let p = spec.p_hat();
    let mut out = vec![0.0, p];
    for a in 1..=ones as usize {
        for b in 0..=zeros as usize {
            let m = a as f64 / (a + b) as f64;
            if m < p - TOL {
                out.push(m);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    Ok(out)
}

/// `N·p̂/(2N−1)`.
pub fn bernoulli_equilibrium_welfare(spec: BernoulliEqSpec) -> f64 {
    let n = spec.n as f64;
    n * spec.p_hat() / (2.0 * n - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    /// `(2 − 1/N)(1 − e^{−Nζ})/(Nζ)`.
    pub bound: f64,
    /// First-best over equilibrium welfare.
    pub exact_ratio: f64,
    pub first_best: f64,
    pub equilibrium_welfare: f64,
}

pub fn poa_lower_bound(spec: BernoulliEqSpec) -> LowerBound {
    let n = spec.n as f64;
    let nz = n * spec.zeta;
    let bound = if nz == 0.0 {
        2.0 - 1.0 / n
    } else {
        (2.0 - 1.0 / n) * (1.0 - (-nz).exp()) / nz
    };
    let first_best = 1.0 - (1.0 - spec.zeta).powi(spec.n as i32);
    let equilibrium_welfare = bernoulli_equilibrium_welfare(spec);
    let exact_ratio = if equilibrium_welfare > 0.0 {
        first_best / equilibrium_welfare
    } else {
        1.0
    };
    LowerBound {
        bound,
        exact_ratio,
        first_best,
        equilibrium_welfare,
    }
}
