//! Simulation and certification engine for competitive Bayesian persuasion
//! with top-k selection.
//!
//! `N` agents each hold a private value drawn from an independent prior and
//! commit to a signaling scheme. A principal observes one signal per agent,
//! forms posterior means, and selects the `k` agents with the highest means,
//! breaking ties uniformly at random. Agents are paid `u_i(v)` when selected;
//! the principal's welfare is the sum of the selected posterior means.
//!
//! The crate is organised by capability:
//!
//! * [`model`]: priors, utilities, Bayes-plausible schemes, the top-k
//!   selection rule, selection/win probabilities, utilities, welfare and
//!   first-best welfare (exact enumeration or seeded Monte Carlo).
//! * [`equilibria`]: the closed-form symmetric Bernoulli equilibrium, the
//!   ε-grain strategy space, exhaustive and local-search best responses,
//!   best-response dynamics and ε-NE verification.
//! * [`certify`]: quantile cuts, the welfare upper bound `SW'`, contributor
//!   classification, the deviation signal `s*`, and per-instance
//!   price-of-anarchy certificates (general, warm-up and ε-discretized).
//! * [`noisy`]: selection under multiplicative uniform observation noise.
//! * [`io`]: the JSON instance/profile formats shared with the CLI.
//! * [`cli`]: the `persuade` command-line front end.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory (`cargo run --example <name>`).

pub mod certify;
pub mod cli;
pub mod equilibria;
pub mod error;
pub mod io;
pub mod mc;
pub mod model;
pub mod noisy;

pub use error::{Error, Result};

/// Absolute tolerance for comparing posterior means and plausibility sums.
pub const TOL: f64 = 1e-12;

/// Signals lighter than this are dropped on construction.
pub const MASS_EPS: f64 = 1e-15;
