//! Equilibria: the closed-form symmetric Bernoulli equilibrium, the
//! ε-grain strategy space, best responses, best-response dynamics and
//! ε-NE verification.

mod bernoulli;
mod best_response;
mod dynamics;
mod grains;
mod verify;

pub use bernoulli::{
    bernoulli_equilibrium_scheme, bernoulli_equilibrium_scheme_on_cells,
    bernoulli_equilibrium_welfare, grain_aligned_boundaries, poa_lower_bound, BernoulliEqSpec,
    LowerBound,
};
pub use best_response::{best_response, BestResponse, BrMode, DEFAULT_RESTARTS};
pub use dynamics::{best_response_dynamics, DynamicsConfig, DynamicsOutcome, LogEntry};
pub use grains::{
    count_set_partitions, enumerate_discretized_schemes, DiscretizationSpec, GrainSpace,
    VectorPartitions, GRAIN_CAP,
};
pub use verify::{regret_report, verify_epsilon_ne, AgentRegret, RegretReport};
