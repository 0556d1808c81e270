use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cascade_core::{engine, mean_field, CentralityMode, EngineSettings, ImitationMode};
use cascade_protect::config::{parse_config, ExperimentConfig};
use cascade_protect::output;

#[derive(Parser)]
#[command(
    name = "cascade-protect",
    version,
    about = "Simulate cascading failure and evolving protection on random networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one realization and write its time series and edge list
    Run {
        #[command(flatten)]
        common: Common,
        /// Master seed (required: no wall-clock default)
        #[arg(long)]
        seed: u64,
    },
    /// Simulate an ensemble and write per-realization series plus means
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
    },
    /// Sweep p_l or p_c and write the stationary summary table
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
    },
    /// Evaluate the analytic oracles and write a key-value block
    Oracle {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Configuration file (line-oriented `key = value`); defaults apply when
    /// omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing
    #[arg(long)]
    out: PathBuf,
    /// Override the configured centrality scaling
    #[arg(long, value_enum)]
    centrality: Option<CentralityArg>,
    /// Override the configured imitation order
    #[arg(long, value_enum)]
    imitation: Option<ImitationArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CentralityArg {
    Max,
    Euclid,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImitationArg {
    Sequential,
    Synchronous,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { common, seed } => {
            let (config, settings, out) = prepare(&common)?;
            cmd_run(&config, &settings, seed, &out)
        }
        Command::Ensemble { common, seed } => {
            let (config, settings, out) = prepare(&common)?;
            cmd_ensemble(&config, &settings, seed, &out)
        }
        Command::Sweep { common, seed } => {
            let (config, settings, out) = prepare(&common)?;
            cmd_sweep(&config, &settings, seed, &out)
        }
        Command::Oracle { common } => {
            let (config, _, out) = prepare(&common)?;
            cmd_oracle(&config, &out)
        }
    }
}

fn prepare(common: &Common) -> Result<(ExperimentConfig, EngineSettings, PathBuf)> {
    let mut config = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            parse_config(&text).with_context(|| format!("{}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(mode) = common.centrality {
        config.centrality = match mode {
            CentralityArg::Max => CentralityMode::MaxNorm,
            CentralityArg::Euclid => CentralityMode::EuclidNorm,
        };
    }
    if let Some(mode) = common.imitation {
        config.imitation = match mode {
            ImitationArg::Sequential => ImitationMode::Sequential,
            ImitationArg::Synchronous => ImitationMode::Synchronous,
        };
    }
    let settings = EngineSettings {
        centrality: config.centrality,
        imitation: config.imitation,
        exploration: config.exploration,
        window_fraction: config.window_fraction,
        cv_threshold: config.threshold,
    };
    fs::create_dir_all(&common.out)
        .with_context(|| format!("cannot create output directory {}", common.out.display()))?;
    Ok((config, settings, common.out.clone()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_run(
    config: &ExperimentConfig,
    settings: &EngineSettings,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let result = engine::run_with(&config.params, settings, seed)?;
    write(&out.join("series.csv"), &output::series_csv(&result.series))?;
    let net = engine::network_for_run(&config.params, settings, seed)?;
    write(&out.join("edges.txt"), &net.to_edge_list())?;
    Ok(())
}

fn cmd_ensemble(
    config: &ExperimentConfig,
    settings: &EngineSettings,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let realizations = config.params.realizations;
    let ensemble = engine::run_ensemble_with(&config.params, settings, seed, realizations)?;
    for (k, run) in ensemble.runs.iter().enumerate() {
        write(
            &out.join(format!("run_{k:03}.csv")),
            &output::series_csv(&run.series),
        )?;
    }
    write(
        &out.join("ensemble_mean.csv"),
        &output::series_csv(&ensemble.mean_series),
    )?;
    Ok(())
}

fn cmd_sweep(
    config: &ExperimentConfig,
    settings: &EngineSettings,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let points = engine::sweep_with(
        &config.params,
        settings,
        config.axis,
        &config.values,
        seed,
        config.params.realizations,
    )?;
    write(&out.join("sweep.csv"), &output::sweep_csv(&points))?;
    for (i, point) in points.iter().enumerate() {
        write(
            &out.join(format!("point_{i:02}_mean.csv")),
            &output::series_csv(&point.mean_series),
        )?;
    }
    Ok(())
}

fn cmd_oracle(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let o = &config.oracle;
    let mf = mean_field(
        o.gamma,
        o.beta,
        o.p_p,
        o.x,
        o.n_f,
        o.f_p,
        config.params.f_m,
    )?;
    let block = output::oracle_block(&mf);
    print!("{block}");
    write(&out.join("oracle.txt"), &block)?;
    Ok(())
}
