//! Instances, Bayes-plausible schemes, the top-k selection rule and the
//! exact/Monte Carlo evaluation of utilities and welfare.

mod eval;
mod instance;
mod prior;
mod scheme;
mod selection;
mod utility;

pub use eval::{
    contributions, expected_utility, expected_welfare, expected_welfare_with_cap, first_best,
    first_best_with_cap, win_probabilities, win_probabilities_mc, EvalMode, Estimate, Method,
    WinCurve, WinProbabilities, ENUMERATION_CAP,
};
pub use instance::{Instance, StrategyProfile};
pub use prior::{Prior, ValueAtom};
pub use scheme::{
    posterior_mean, validate_scheme, SchemeDraft, Signal, SignalingScheme, ValidationReport,
    Violation,
};
pub use selection::{own_selection_prob, selection_probabilities, SelectionProbabilities};
pub use utility::UtilityFn;
