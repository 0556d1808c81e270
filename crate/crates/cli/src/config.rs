//! Line-oriented `key = value` experiment configuration.
//!
//! Every key has a documented default, unknown keys are rejected, and every
//! probability is range-checked at parse time with the offending line number
//! in the error. `serialize` followed by `parse` reproduces the
//! configuration exactly.

use std::fmt;

use cascade_core::dynamics::ModelParams;
use cascade_core::{CentralityMode, ExplorationMode, ImitationMode, SweepAxis};

/// Analytic-oracle inputs evaluated by the `oracle` command.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleInputs {
    /// Failed-to-recovered transition probability of the two-state chain.
    pub gamma: f64,
    /// Recovered-to-failed transition probability.
    pub beta: f64,
    /// Base protection probability entering the effective-protection
    /// correction.
    pub p_p: f64,
    /// Combined link threat p_l * p_ER.
    pub x: f64,
    /// Failed-node count in the effective-protection correction.
    pub n_f: u32,
    /// Protection level entering the stationary-capital formulas.
    pub f_p: f64,
}

impl Default for OracleInputs {
    fn default() -> Self {
        OracleInputs {
            gamma: 0.368,
            beta: 1.0,
            p_p: 0.5,
            x: 0.1,
            n_f: 1,
            f_p: 0.5,
        }
    }
}

/// Full experiment configuration: model parameters plus command-specific
/// settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    /// Trailing fraction of the series used as the stationary window.
    pub window_fraction: f64,
    /// CV convergence threshold.
    pub threshold: f64,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub centrality: CentralityMode,
    pub imitation: ImitationMode,
    pub exploration: ExplorationMode,
    pub oracle: OracleInputs,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: ModelParams::default(),
            window_fraction: 0.25,
            threshold: 0.10,
            axis: SweepAxis::LinkProbability,
            values: (1..=10).map(|i| i as f64 / 100.0).collect(),
            centrality: CentralityMode::MaxNorm,
            imitation: ImitationMode::Sequential,
            exploration: ExplorationMode::PerValue,
            oracle: OracleInputs::default(),
        }
    }
}

/// Parse error with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ParseError> {
    raw.parse::<f64>()
        .map_err(|_| err(line, format!("`{key}` expects a number, got `{raw}`")))
}

fn parse_unit(line: usize, key: &str, raw: &str) -> Result<f64, ParseError> {
    let v = parse_f64(line, key, raw)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(err(line, format!("`{key}` = {v} outside [0, 1]")));
    }
    Ok(v)
}

fn parse_nonneg(line: usize, key: &str, raw: &str) -> Result<f64, ParseError> {
    let v = parse_f64(line, key, raw)?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(err(line, format!("`{key}` = {raw} must be finite and >= 0")));
    }
    Ok(v)
}

fn parse_usize(line: usize, key: &str, raw: &str) -> Result<usize, ParseError> {
    raw.parse::<usize>()
        .map_err(|_| err(line, format!("`{key}` expects a non-negative integer, got `{raw}`")))
}

/// Parses a configuration document. Empty input yields the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ParseError> {
    let mut config = ExperimentConfig::default();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line, format!("expected `key = value`, got `{content}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(line, format!("`{key}` has no value")));
        }
        apply_key(&mut config, line, key, value)?;
    }
    Ok(config)
}

fn apply_key(
    config: &mut ExperimentConfig,
    line: usize,
    key: &str,
    value: &str,
) -> Result<(), ParseError> {
    let p = &mut config.params;
    match key {
        "n" => {
            p.n = parse_usize(line, key, value)?;
            if p.n == 0 {
                return Err(err(line, "`n` must be at least 1"));
            }
        }
        "p_c" => p.p_c = parse_unit(line, key, value)?,
        "f_m" => {
            p.f_m = parse_unit(line, key, value)?;
            if p.f_m >= 1.0 {
                return Err(err(line, "`f_m` must be below 1"));
            }
        }
        "p_n" => p.p_n = parse_unit(line, key, value)?,
        "p_l" => p.p_l = parse_unit(line, key, value)?,
        "pp_max" => p.pp_max = parse_unit(line, key, value)?,
        "cp_half" => p.cp_half = parse_nonneg(line, key, value)?,
        "p_r" => p.p_r = parse_unit(line, key, value)?,
        "s" => p.s = parse_nonneg(line, key, value)?,
        "p_e" => p.p_e = parse_unit(line, key, value)?,
        "mu" => {
            p.mu = parse_f64(line, key, value)?;
            if !p.mu.is_finite() {
                return Err(err(line, "`mu` must be finite"));
            }
        }
        "sigma_e" => p.sigma_e = parse_nonneg(line, key, value)?,
        "T" => p.t_max = parse_usize(line, key, value)?,
        "rec1" => p.rec1 = parse_unit(line, key, value)?,
        "failtime" => {
            let v = parse_usize(line, key, value)?;
            if v == 0 {
                return Err(err(line, "`failtime` must be at least 1"));
            }
            p.failtime = v as u32;
        }
        "realizations" => {
            p.realizations = parse_usize(line, key, value)?;
            if p.realizations == 0 {
                return Err(err(line, "`realizations` must be at least 1"));
            }
        }
        "init_fp0" => p.init_fp0 = parse_f64(line, key, value)?,
        "init_fp1" => p.init_fp1 = parse_f64(line, key, value)?,
        "init_sd" => p.init_sd = parse_nonneg(line, key, value)?,
        "window_fraction" => {
            let v = parse_f64(line, key, value)?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(err(line, format!("`window_fraction` = {v} outside (0, 1]")));
            }
            config.window_fraction = v;
        }
        "threshold" => config.threshold = parse_nonneg(line, key, value)?,
        "axis" => {
            config.axis = match value {
                "p_l" => SweepAxis::LinkProbability,
                "p_c" => SweepAxis::ConnectionProbability,
                other => return Err(err(line, format!("`axis` must be p_l or p_c, got `{other}`"))),
            }
        }
        "values" => {
            let mut values = Vec::new();
            for part in value.split(',') {
                values.push(parse_unit(line, "values", part.trim())?);
            }
            if values.is_empty() {
                return Err(err(line, "`values` must list at least one number"));
            }
            config.values = values;
        }
        "centrality" => {
            config.centrality = match value {
                "max" => CentralityMode::MaxNorm,
                "euclid" => CentralityMode::EuclidNorm,
                other => {
                    return Err(err(line, format!("`centrality` must be max or euclid, got `{other}`")))
                }
            }
        }
        "imitation" => {
            config.imitation = match value {
                "sequential" => ImitationMode::Sequential,
                "synchronous" => ImitationMode::Synchronous,
                other => {
                    return Err(err(
                        line,
                        format!("`imitation` must be sequential or synchronous, got `{other}`"),
                    ))
                }
            }
        }
        "exploration" => {
            config.exploration = match value {
                "per_value" => ExplorationMode::PerValue,
                "pick_one" => ExplorationMode::PickOne,
                other => {
                    return Err(err(
                        line,
                        format!("`exploration` must be per_value or pick_one, got `{other}`"),
                    ))
                }
            }
        }
        "gamma" => config.oracle.gamma = parse_unit(line, key, value)?,
        "beta" => config.oracle.beta = parse_unit(line, key, value)?,
        "p_p" => config.oracle.p_p = parse_unit(line, key, value)?,
        "x" => config.oracle.x = parse_unit(line, key, value)?,
        "n_f" => config.oracle.n_f = parse_usize(line, key, value)? as u32,
        "f_p" => config.oracle.f_p = parse_unit(line, key, value)?,
        other => return Err(err(line, format!("unknown key `{other}`"))),
    }
    Ok(())
}

/// Serializes a configuration in canonical key order. Parsing the output
/// reproduces the configuration exactly.
pub fn serialize_config(config: &ExperimentConfig) -> String {
    let p = &config.params;
    let values = config
        .values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };
    push("n", p.n.to_string());
    push("p_c", p.p_c.to_string());
    push("f_m", p.f_m.to_string());
    push("p_n", p.p_n.to_string());
    push("p_l", p.p_l.to_string());
    push("pp_max", p.pp_max.to_string());
    push("cp_half", p.cp_half.to_string());
    push("p_r", p.p_r.to_string());
    push("s", p.s.to_string());
    push("p_e", p.p_e.to_string());
    push("mu", p.mu.to_string());
    push("sigma_e", p.sigma_e.to_string());
    push("T", p.t_max.to_string());
    push("rec1", p.rec1.to_string());
    push("failtime", p.failtime.to_string());
    push("realizations", p.realizations.to_string());
    push("init_fp0", p.init_fp0.to_string());
    push("init_fp1", p.init_fp1.to_string());
    push("init_sd", p.init_sd.to_string());
    push("window_fraction", config.window_fraction.to_string());
    push("threshold", config.threshold.to_string());
    push("axis", config.axis.key().to_string());
    push("values", values);
    push(
        "centrality",
        match config.centrality {
            CentralityMode::MaxNorm => "max",
            CentralityMode::EuclidNorm => "euclid",
        }
        .to_string(),
    );
    push(
        "imitation",
        match config.imitation {
            ImitationMode::Sequential => "sequential",
            ImitationMode::Synchronous => "synchronous",
        }
        .to_string(),
    );
    push(
        "exploration",
        match config.exploration {
            ExplorationMode::PerValue => "per_value",
            ExplorationMode::PickOne => "pick_one",
        }
        .to_string(),
    );
    push("gamma", config.oracle.gamma.to_string());
    push("beta", config.oracle.beta.to_string());
    push("p_p", config.oracle.p_p.to_string());
    push("x", config.oracle.x.to_string());
    push("n_f", config.oracle.n_f.to_string());
    push("f_p", config.oracle.f_p.to_string());
    out
}
