use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Piecewise-linear, weakly increasing utility of being selected.
///
/// Between breakpoints the utility is interpolated linearly; outside the
/// breakpoint range it is held constant at the nearest endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityFn {
    breakpoints: Vec<(f64, f64)>,
}

impl UtilityFn {
    pub fn new(mut breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidUtility("no breakpoints".into()));
        }
        breakpoints.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(v, u) in &breakpoints {
            if !v.is_finite() || !u.is_finite() {
                return Err(Error::InvalidUtility("non-finite breakpoint".into()));
            }
            if u < 0.0 {
                return Err(Error::InvalidUtility(format!("negative utility {u}")));
            }
        }
        for w in breakpoints.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidUtility(format!("duplicate breakpoint {}", w[0].0)));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidUtility("utility must be weakly increasing".into()));
            }
        }
        // Only the value 0 itself may have zero utility.
        if let Some(&(v, _)) = breakpoints.iter().find(|&&(v, u)| u == 0.0 && v > 0.0) {
            return Err(Error::InvalidUtility(format!(
                "utility vanishes at positive value {v}"
            )));
        }
        Ok(Self { breakpoints })
    }

    /// `u ≡ c` for `c > 0`.
    pub fn constant(c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::InvalidUtility("constant utility must be positive".into()));
        }
        Self::new(vec![(0.0, c), (1.0, c)])
    }

    /// `u(v) = v` on `[0, 1]`.
    pub fn identity() -> Self {
        Self {
            breakpoints: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn eval(&self, v: f64) -> f64 {
        let bp = &self.breakpoints;
        let first = bp[0];
        let last = bp[bp.len() - 1];
        if v <= first.0 {
            return first.1;
        }
        if v >= last.0 {
            return last.1;
        }
        let hi = bp.partition_point(|&(x, _)| x <= v);
        let (x0, u0) = bp[hi - 1];
        let (x1, u1) = bp[hi];
        u0 + (u1 - u0) * (v - x0) / (x1 - x0)
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        let u0 = self.breakpoints[0].1;
        self.breakpoints
            .iter()
            .all(|&(_, u)| u == u0)
            .then_some(u0)
    }
}
