//! Agent-based simulation of cascading failure and evolving protection on
//! random networks, with the matching closed-form oracles.
//!
//! The crate splits into four layers:
//!
//! - [`netgen`]: Erdős–Rényi generation, degree statistics, eigenvector
//!   centrality.
//! - [`dynamics`]: the per-step kernels (payoff, protection, failure,
//!   imitation, exploration, recovery) as pure transition functions.
//! - [`engine`]: step ordering, realizations, ensembles, and parameter
//!   sweeps with named random sub-streams for bit-reproducibility.
//! - [`analytics`]: stationarity detection and the mean-field formulas used
//!   to cross-check the simulation.

pub mod analytics;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod netgen;
pub mod rng;

pub use analytics::{
    binomial_failure_pmf, coefficient_of_variation, detect_stationarity, effective_protection,
    markov_stationary, mean_field, network_effect_curve, not_failed_fraction_next,
    stationary_capital, CapitalMode, MeanFieldResult, StationaryStats, WindowStats,
};
pub use dynamics::{
    capital_update, imitation_probability, protection_level, protection_probability, AgentState,
    ExplorationMode, ImitationMode, ModelParams, ResolveReport,
};
pub use engine::{
    network_for_run, run, run_ensemble, run_ensemble_with, run_with, step, sweep, sweep_with,
    EngineSettings, EnsembleResult, RunResult, SweepAxis, SweepPoint, TimeSeriesRecord,
};
pub use error::{Error, Result};
pub use netgen::{
    degree_pmf, eigenvector_centrality, generate_er, generate_er_with_mode, CentralityMode,
    NetworkModel,
};
pub use rng::derive_seed;
