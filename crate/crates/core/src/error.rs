use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal has zero total mass")]
    ZeroMass,

    #[error("allocation {allocated} to atom {atom} exceeds its prior mass {mass}")]
    AllocationExceedsPrior {
        atom: usize,
        allocated: f64,
        mass: f64,
    },

    #[error("k = {k} is out of range for {n} agents")]
    BadK { k: usize, n: usize },

    #[error("enumeration needs {needed} outcomes, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("specification violated: {0}")]
    SpecViolation(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid utility function: {0}")]
    InvalidUtility(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid signaling scheme: {0}")]
    InvalidScheme(String),

    #[error("agent {agent} is not a small contributor in the second group")]
    NotSmallContributor { agent: usize },

    #[error("internal invariant broken: {0}")]
    InternalInvariant(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
