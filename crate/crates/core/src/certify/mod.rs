//! Per-instance price-of-anarchy certificates.
//!
//! The pipeline computes quantile cuts and the welfare bound `SW'`, splits
//! agents by selection rate, and either certifies a bound (first or second
//! case) or exhibits a profitable deviation proving the profile is not an
//! equilibrium.

mod certificate;
mod deviation;
mod discretized;
mod params;
mod quantile;
mod warmup;

pub use certificate::{
    certify_poa, classify_agents, CertificateCase, Classification, PoACertificate, TailCheck,
};
pub use deviation::{
    construct_deviation_signal, deviation_analysis, DeviationAnalysis, DeviationSignal, GAIN_TOL,
};
pub use discretized::discretized_certify;
pub use params::{grid_game_parameters, golden_bound, golden_parameters, CertParams};
pub use quantile::{quantile_cuts, sw_prime_upper, QuantileCutResult};
pub use warmup::{warmup_certify, WarmupCertificate, WarmupOutcome};
