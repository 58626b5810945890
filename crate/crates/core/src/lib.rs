//! Dyadic relational event models.
//!
//! A relational event is an instantaneous directed action `(sender,
//! receiver, time)`. Every ordered pair of distinct actors has a hazard
//! `exp(θᵀ u(s, r, X, A_t))` that is constant between events, where `u`
//! collects covariate, degree, recency, triadic and participation-shift
//! statistics of the history `A_t`.
//!
//! Modules:
//! * [`history`] and [`covariates`]: data model and validation; [`io`] for files.
//! * [`effects`]: the statistic catalog and incremental history state.
//! * [`likelihood`]: ordinal and exact-time log-likelihoods with gradients.
//! * [`estimation`]: BFGS maximum likelihood, standard errors, AIC/AICC/BIC.
//! * [`diagnostics`]: residuals, guessing equivalents, ranks, surprise.
//! * [`simulate`]: seeded forward simulation.

pub mod covariates;
pub mod diagnostics;
pub mod effects;
pub mod error;
pub mod estimation;
mod float_serde;
pub mod history;
pub mod io;
pub mod likelihood;
pub mod optimize;
pub mod simulate;
pub mod summary;

pub use covariates::{validate_covariates, Covariate, CovariateSet};
pub use effects::{
    classify_pshift, compute_statistics, effect_dimension, update_state, EffectKind, EffectSpecification, Model,
    PShiftLabel, SufficientState,
};
pub use error::{RemError, Result};
pub use estimation::{compare, evaluate_fit, fit, information_criteria, standard_errors, FitOptions, FitResult};
pub use history::{aggregate_sociomatrix, parse_edgelist, Event, EventHistory, Support, Timing};
pub use likelihood::{loglik_gradient, ordinal_loglik, rate_snapshot, temporal_loglik, Evaluator, LikelihoodResult, RateSnapshot};
pub use simulate::{draw_next_event, simulate_history, SimulationConfig, StopRule};
