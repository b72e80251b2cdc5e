use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters of the two-case welfare argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertParams {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub phi: f64,
}

impl CertParams {
    /// Requires `α > 1`, `0 < β < τ < 1`, `φ > 0` and `φ·τ ≥ α`.
    pub fn new(alpha: f64, beta: f64, tau: f64, phi: f64) -> Result<Self> {
        let ok = alpha > 1.0 && beta > 0.0 && beta < tau && tau < 1.0 && phi > 0.0 && phi * tau >= alpha;
        if !ok {
            return Err(Error::SpecViolation(format!(
                "parameters alpha={alpha} beta={beta} tau={tau} phi={phi} violate \
                 alpha>1, 0<beta<tau<1, phi*tau>=alpha"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            tau,
            phi,
        })
    }

    /// `2/(β(1−1/α))`.
    pub fn case1_bound(&self) -> f64 {
        2.0 / (self.beta * (1.0 - 1.0 / self.alpha))
    }

    /// `2/((1−τ)(1/φ − β/(τφ)))`.
    pub fn case2_bound(&self) -> f64 {
        2.0 / ((1.0 - self.tau) * self.s_star_factor())
    }

    /// `1/φ − β/(τφ)`: guaranteed ratio of the deviation signal's mean to the
    /// deviating agent's tail mean.
    pub fn s_star_factor(&self) -> f64 {
        1.0 / self.phi - self.beta / (self.tau * self.phi)
    }

    /// Case-1 bound of the grid game, `2/(β(1−1/α−εN))`; infinite once the
    /// denominator vanishes.
    pub fn discretized_case1_bound(&self, epsilon: f64, n: usize) -> f64 {
        let slack = 1.0 - 1.0 / self.alpha - epsilon * n as f64;
        if slack <= 0.0 {
            f64::INFINITY
        } else {
            2.0 / (self.beta * slack)
        }
    }

    pub fn overall_bound(&self) -> f64 {
        self.case1_bound().max(self.case2_bound())
    }
}

/// Golden-ratio parameters; `φ` is scaled by `1 + 1e-9` so `φ·τ > α` holds
/// strictly. Both case bounds equal `11 + 5√5` up to that jitter.
pub fn golden_parameters() -> CertParams {
    let s5 = 5f64.sqrt();
    CertParams {
        alpha: (s5 + 1.0) / 2.0,
        beta: s5 - 2.0,
        tau: (s5 - 1.0) / 2.0,
        phi: (s5 + 3.0) / 2.0 * (1.0 + 1e-9),
    }
}

/// Parameters for the grid game, with integer `φ`.
pub fn grid_game_parameters() -> CertParams {
    CertParams {
        alpha: 1.7264,
        beta: 0.21164,
        tau: 0.57883,
        phi: 3.0,
    }
}

/// `11 + 5√5`.
pub fn golden_bound() -> f64 {
    11.0 + 5.0 * 5f64.sqrt()
}
