//! Step orchestration across time, realizations, and parameter sweeps.
//!
//! One realization is strictly sequential; realizations and sweep points run
//! on rayon workers. Determinism does not depend on scheduling: realization k
//! always runs under `derive_seed(master_seed, k)`, and every stage of every
//! step draws from its own named stream (see [`crate::rng`]).

use rayon::prelude::*;

use crate::analytics::{self, StationaryStats};
use crate::dynamics::{
    self, AgentState, ExplorationMode, ImitationMode, ModelParams, ResolveReport,
};
use crate::error::{Error, Result};
use crate::netgen::{self, CentralityMode, NetworkModel};
use crate::rng::{self, derive_seed};

use rand_distr::{Distribution, Normal};

/// Knobs that select between documented semantic variants without touching
/// the parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineSettings {
    pub centrality: CentralityMode,
    pub imitation: ImitationMode,
    pub exploration: ExplorationMode,
    /// Trailing fraction of the series used as the stationary window.
    pub window_fraction: f64,
    /// Convergence threshold on the window coefficient of variation.
    pub cv_threshold: f64,
}

impl Default for EngineSettings {
    fn default() -> Self {
        EngineSettings {
            centrality: CentralityMode::MaxNorm,
            imitation: ImitationMode::Sequential,
            exploration: ExplorationMode::PerValue,
            window_fraction: 0.25,
            cv_threshold: 0.10,
        }
    }
}

/// Population aggregates recorded at the end of each step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: usize,
    /// Failed count / n.
    pub failure_fraction: f64,
    pub mean_capital: f64,
    pub mean_fp0: f64,
    pub mean_fp1: f64,
    /// Cross-population |CV| of f_p0; `None` when the mean is near zero.
    pub cv_fp0: Option<f64>,
    /// Cross-population |CV| of f_p1; `None` when the mean is near zero.
    pub cv_fp1: Option<f64>,
    /// Mean protection level over all agents.
    pub mean_fp: f64,
    /// Mean protection probability over the nodes whose failure potential
    /// was evaluated this step; 0 when none were flagged.
    pub mean_pp: f64,
}

/// Everything one seeded realization produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub params: ModelParams,
    pub seed: u64,
    /// T + 1 records including the pre-dynamics state at t = 0.
    pub series: Vec<TimeSeriesRecord>,
    pub final_snapshot: Vec<AgentState>,
    /// Trailing-window summary; `None` when the series is too short for the
    /// window.
    pub stationary: Option<StationaryStats>,
}

/// An ensemble of realizations plus per-step means across them.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    /// Ordered by realization index.
    pub runs: Vec<RunResult>,
    pub mean_series: Vec<TimeSeriesRecord>,
    /// Stationary summary of the ensemble-mean series.
    pub stationary: Option<StationaryStats>,
}

/// Parameter swept by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Per-link propagation probability p_l.
    LinkProbability,
    /// Connection probability p_c of the random graph.
    ConnectionProbability,
}

impl SweepAxis {
    pub fn key(&self) -> &'static str {
        match self {
            SweepAxis::LinkProbability => "p_l",
            SweepAxis::ConnectionProbability => "p_c",
        }
    }

    fn apply(&self, params: &mut ModelParams, value: f64) {
        match self {
            SweepAxis::LinkProbability => params.p_l = value,
            SweepAxis::ConnectionProbability => params.p_c = value,
        }
    }
}

/// One sweep point: the ensemble-level summary plus each realization's
/// stationary verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    /// Stationary summary of the ensemble-mean series.
    pub stationary: StationaryStats,
    /// Per-realization summaries, ordered by realization index.
    pub run_stationary: Vec<Option<StationaryStats>>,
    pub mean_series: Vec<TimeSeriesRecord>,
}

/// Draws the initial population: capital 1, strategies from
/// N(init_fp0, init_sd^2) and N(init_fp1, init_sd^2) (all f_p0 draws first,
/// then all f_p1 draws), protection levels derived, nobody failed.
fn init_population(net: &NetworkModel, params: &ModelParams, run_seed: u64) -> Vec<AgentState> {
    let mut rng = rng::stage_rng(run_seed, rng::TAG_INIT, 0);
    let fp0_dist = Normal::new(params.init_fp0, params.init_sd).expect("validated init_sd");
    let fp1_dist = Normal::new(params.init_fp1, params.init_sd).expect("validated init_sd");
    let fp0s: Vec<f64> = (0..params.n).map(|_| fp0_dist.sample(&mut rng)).collect();
    let fp1s: Vec<f64> = (0..params.n).map(|_| fp1_dist.sample(&mut rng)).collect();
    fp0s.into_iter()
        .zip(fp1s)
        .enumerate()
        .map(|(i, (fp0, fp1))| {
            let mut agent = AgentState::new(1.0, fp0, fp1);
            agent.fp = dynamics::protection_level(fp0, fp1, net.centrality()[i], params.f_m);
            agent
        })
        .collect()
}

/// Advances the population by one step, applying the seven stages in the
/// canonical order: imitation, exploration, payoff, origination,
/// propagation, resolution, reset.
pub fn step(
    net: &NetworkModel,
    agents: &mut [AgentState],
    params: &ModelParams,
    settings: &EngineSettings,
    run_seed: u64,
    t: usize,
) -> ResolveReport {
    let t64 = t as u64;
    dynamics::imitation_sweep(
        agents,
        params.p_r,
        params.s,
        settings.imitation,
        &mut rng::stage_rng(run_seed, rng::TAG_IMITATION, t64),
    );
    dynamics::exploration_sweep(
        agents,
        params.p_e,
        params.mu,
        params.sigma_e,
        settings.exploration,
        &mut rng::stage_rng(run_seed, rng::TAG_EXPLORATION, t64),
    );
    // Payoff: protection levels are refreshed for everyone; only agents not
    // serving a failure earn. A node whose countdown just ran out earns the
    // unit payoff from capital 0 here, before its potential is re-evaluated.
    for (i, agent) in agents.iter_mut().enumerate() {
        agent.fp =
            dynamics::protection_level(agent.fp0, agent.fp1, net.centrality()[i], params.f_m);
        if !agent.mid_failure() {
            agent.capital = dynamics::capital_update(agent.capital, params.f_m, agent.fp);
        }
    }
    dynamics::originate_potentials(
        agents,
        params.p_n,
        &mut rng::stage_rng(run_seed, rng::TAG_ORIGINATE, t64),
    );
    dynamics::propagate_potentials(
        net,
        agents,
        params.p_l,
        &mut rng::stage_rng(run_seed, rng::TAG_PROPAGATE, t64),
    );
    let report = dynamics::resolve_failures(
        agents,
        params.pp_max,
        params.cp_half,
        params.failtime,
        &mut rng::stage_rng(run_seed, rng::TAG_RESOLVE, t64),
    );
    dynamics::reset_potentials(
        agents,
        params.rec1,
        &mut rng::stage_rng(run_seed, rng::TAG_RESET, t64),
    );
    report
}

/// Snapshots the population aggregates after a step.
pub fn record(agents: &[AgentState], t: usize, resolve: ResolveReport) -> TimeSeriesRecord {
    let n = agents.len() as f64;
    let failed = agents.iter().filter(|a| a.failed).count();
    let fp0s: Vec<f64> = agents.iter().map(|a| a.fp0).collect();
    let fp1s: Vec<f64> = agents.iter().map(|a| a.fp1).collect();
    let cv = |values: &[f64]| match analytics::coefficient_of_variation(values) {
        Ok(v) => Some(v.abs()),
        Err(_) => None,
    };
    TimeSeriesRecord {
        t,
        failure_fraction: failed as f64 / n,
        mean_capital: agents.iter().map(|a| a.capital).sum::<f64>() / n,
        mean_fp0: fp0s.iter().sum::<f64>() / n,
        mean_fp1: fp1s.iter().sum::<f64>() / n,
        cv_fp0: cv(&fp0s),
        cv_fp1: cv(&fp1s),
        mean_fp: agents.iter().map(|a| a.fp).sum::<f64>() / n,
        mean_pp: resolve.mean_pp,
    }
}

/// Trailing-window summary of a recorded series.
pub fn stationary_stats(
    series: &[TimeSeriesRecord],
    window_fraction: f64,
    threshold: f64,
) -> Result<StationaryStats> {
    let fp0: Vec<f64> = series.iter().map(|r| r.mean_fp0).collect();
    let fp1: Vec<f64> = series.iter().map(|r| r.mean_fp1).collect();
    let frag0 = analytics::detect_stationarity(&fp0, window_fraction, threshold)?;
    let frag1 = analytics::detect_stationarity(&fp1, window_fraction, threshold)?;
    let window = frag0.window_start..=frag0.window_end;
    let len = (frag0.window_end - frag0.window_start + 1) as f64;
    let mean_over = |f: &dyn Fn(&TimeSeriesRecord) -> f64| {
        series[window.clone()].iter().map(f).sum::<f64>() / len
    };
    Ok(StationaryStats {
        window_start: frag0.window_start,
        window_end: frag0.window_end,
        fixed_mean_failure: mean_over(&|r| r.failure_fraction),
        fixed_mean_capital: mean_over(&|r| r.mean_capital),
        fixed_mean_fp0: frag0.fixed_mean,
        fixed_mean_fp1: frag1.fixed_mean,
        cv_fp0: frag0.cv,
        cv_fp1: frag1.cv,
        converged: frag0.converged && frag1.converged,
    })
}

/// Runs one realization under the default settings.
pub fn run(params: &ModelParams, seed: u64) -> Result<RunResult> {
    run_with(params, &EngineSettings::default(), seed)
}

/// The network a realization under `seed` builds: generation uses a fixed
/// sub-stream of the run seed, so this reproduces exactly what [`run_with`]
/// simulates on (useful for edge-list export).
pub fn network_for_run(
    params: &ModelParams,
    settings: &EngineSettings,
    seed: u64,
) -> Result<NetworkModel> {
    netgen::generate_er_with_mode(
        params.n,
        params.p_c,
        derive_seed(seed, rng::TAG_NETWORK),
        settings.centrality,
    )
}

/// Runs one realization: builds the network from a sub-seed, initializes the
/// population, executes `t_max` steps, and records the series (including the
/// t = 0 pre-dynamics state).
pub fn run_with(params: &ModelParams, settings: &EngineSettings, seed: u64) -> Result<RunResult> {
    params.validate()?;
    let net = network_for_run(params, settings, seed)?;
    let mut agents = init_population(&net, params, seed);
    let mut series = Vec::with_capacity(params.t_max + 1);
    series.push(record(&agents, 0, ResolveReport::empty()));
    for t in 1..=params.t_max {
        let report = step(&net, &mut agents, params, settings, seed, t);
        series.push(record(&agents, t, report));
    }
    let stationary = stationary_stats(&series, settings.window_fraction, settings.cv_threshold).ok();
    Ok(RunResult {
        params: params.clone(),
        seed,
        series,
        final_snapshot: agents,
        stationary,
    })
}

/// Runs `realizations` independent realizations under sub-seeds
/// `derive_seed(master_seed, k)` and averages the series per step.
pub fn run_ensemble(
    params: &ModelParams,
    master_seed: u64,
    realizations: usize,
) -> Result<EnsembleResult> {
    run_ensemble_with(params, &EngineSettings::default(), master_seed, realizations)
}

pub fn run_ensemble_with(
    params: &ModelParams,
    settings: &EngineSettings,
    master_seed: u64,
    realizations: usize,
) -> Result<EnsembleResult> {
    if realizations == 0 {
        return Err(Error::invalid("realizations", "ensemble size must be at least 1"));
    }
    params.validate()?;
    let runs: Vec<RunResult> = (0..realizations)
        .into_par_iter()
        .map(|k| run_with(params, settings, derive_seed(master_seed, k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mean_series = ensemble_mean_series(&runs);
    let stationary =
        stationary_stats(&mean_series, settings.window_fraction, settings.cv_threshold).ok();
    Ok(EnsembleResult {
        runs,
        mean_series,
        stationary,
    })
}

/// Per-step means across realizations. Missing CV entries are averaged over
/// the realizations where they are defined.
fn ensemble_mean_series(runs: &[RunResult]) -> Vec<TimeSeriesRecord> {
    let steps = runs[0].series.len();
    let k = runs.len() as f64;
    (0..steps)
        .map(|t| {
            let at = |f: &dyn Fn(&TimeSeriesRecord) -> f64| {
                runs.iter().map(|r| f(&r.series[t])).sum::<f64>() / k
            };
            let cv_mean = |f: &dyn Fn(&TimeSeriesRecord) -> Option<f64>| {
                let defined: Vec<f64> = runs.iter().filter_map(|r| f(&r.series[t])).collect();
                if defined.is_empty() {
                    None
                } else {
                    Some(defined.iter().sum::<f64>() / defined.len() as f64)
                }
            };
            TimeSeriesRecord {
                t,
                failure_fraction: at(&|r| r.failure_fraction),
                mean_capital: at(&|r| r.mean_capital),
                mean_fp0: at(&|r| r.mean_fp0),
                mean_fp1: at(&|r| r.mean_fp1),
                cv_fp0: cv_mean(&|r| r.cv_fp0),
                cv_fp1: cv_mean(&|r| r.cv_fp1),
                mean_fp: at(&|r| r.mean_fp),
                mean_pp: at(&|r| r.mean_pp),
            }
        })
        .collect()
}

/// Sweeps `axis` over `values`, running one ensemble per value. Sweep point
/// `i` uses master seed `derive_seed(master_seed, TAG_SWEEP_BASE + i)`, so
/// results are deterministic and independent of evaluation order.
pub fn sweep(
    base: &ModelParams,
    axis: SweepAxis,
    values: &[f64],
    master_seed: u64,
    realizations: usize,
) -> Result<Vec<SweepPoint>> {
    sweep_with(base, &EngineSettings::default(), axis, values, master_seed, realizations)
}

pub fn sweep_with(
    base: &ModelParams,
    settings: &EngineSettings,
    axis: SweepAxis,
    values: &[f64],
    master_seed: u64,
    realizations: usize,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::invalid("values", "sweep needs at least one axis value"));
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut params = base.clone();
            axis.apply(&mut params, value);
            let point_seed = derive_seed(master_seed, rng::TAG_SWEEP_BASE + i as u64);
            let ensemble = run_ensemble_with(&params, settings, point_seed, realizations)?;
            let stationary = stationary_stats(
                &ensemble.mean_series,
                settings.window_fraction,
                settings.cv_threshold,
            )?;
            Ok(SweepPoint {
                axis_value: value,
                stationary,
                run_stationary: ensemble.runs.iter().map(|r| r.stationary).collect(),
                mean_series: ensemble.mean_series,
            })
        })
        .collect()
}
