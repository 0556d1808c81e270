//! Closed-form oracles and statistical post-processing: stationarity
//! detection, the two-state chain, effective protection, stationary capital,
//! and the distributional formulas. Everything here is pure and reentrant.

use crate::error::{Error, Result};
use crate::netgen::binomial_coefficient;

/// Means closer to zero than this make a coefficient of variation
/// meaningless.
pub const NEAR_ZERO_MEAN: f64 = 1e-9;

/// Population (divide-by-N) standard deviation divided by the mean, signed.
///
/// Errors with [`Error::UndefinedCv`] when |mean| <= 1e-9.
pub fn coefficient_of_variation(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::invalid("series", "empty series"));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    if mean.abs() <= NEAR_ZERO_MEAN {
        return Err(Error::UndefinedCv { mean });
    }
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

/// Stationarity verdict for one series over its trailing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    /// First index of the trailing window.
    pub window_start: usize,
    /// Last index of the trailing window (inclusive).
    pub window_end: usize,
    /// Mean over the window ("fluctuations around a fixed mean value").
    pub fixed_mean: f64,
    /// |CV| over the window; `None` when the window mean is near zero.
    pub cv: Option<f64>,
    pub converged: bool,
}

/// Computes the coefficient of variation over the trailing
/// `window_fraction` of `series` and calls it stationary when |CV| is at
/// most `threshold`.
///
/// The window length is `round(window_fraction * len)`; windows shorter than
/// two samples are rejected, as are series shorter than eight.
pub fn detect_stationarity(
    series: &[f64],
    window_fraction: f64,
    threshold: f64,
) -> Result<WindowStats> {
    if series.len() < 8 {
        return Err(Error::invalid(
            "series",
            format!("length {} below the minimum of 8", series.len()),
        ));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::invalid(
            "window_fraction",
            format!("{window_fraction} outside (0, 1]"),
        ));
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::invalid("threshold", "threshold must be >= 0"));
    }
    let len = series.len();
    let window_len = ((window_fraction * len as f64).round() as usize).min(len);
    if window_len < 2 {
        return Err(Error::invalid(
            "window_fraction",
            format!("window of {window_len} sample(s) is shorter than 2"),
        ));
    }
    let window = &series[len - window_len..];
    let fixed_mean = window.iter().sum::<f64>() / window_len as f64;
    let cv = match coefficient_of_variation(window) {
        Ok(v) => Some(v.abs()),
        Err(Error::UndefinedCv { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(WindowStats {
        window_start: len - window_len,
        window_end: len - 1,
        fixed_mean,
        cv,
        converged: cv.is_some_and(|v| v <= threshold),
    })
}

/// Trailing-window summary of one realization: the four fixed means plus the
/// convergence verdict on the two strategy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryStats {
    pub window_start: usize,
    pub window_end: usize,
    pub fixed_mean_failure: f64,
    pub fixed_mean_capital: f64,
    pub fixed_mean_fp0: f64,
    pub fixed_mean_fp1: f64,
    /// |CV| of the mean-f_p0 series over the window.
    pub cv_fp0: Option<f64>,
    /// |CV| of the mean-f_p1 series over the window.
    pub cv_fp1: Option<f64>,
    /// Both strategy CVs defined and at most the threshold.
    pub converged: bool,
}

/// Stationary law of the two-state chain with transition matrix
/// [[1-gamma, beta], [gamma, 1-beta]]: p_A = beta / (gamma + beta),
/// p_B = gamma / (gamma + beta).
pub fn markov_stationary(gamma: f64, beta: f64) -> Result<(f64, f64)> {
    for (name, v) in [("gamma", gamma), ("beta", beta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter {
                name,
                message: format!("{v} outside [0, 1]"),
            });
        }
    }
    let total = gamma + beta;
    if total == 0.0 {
        return Err(Error::DegenerateChain);
    }
    Ok((beta / total, gamma / total))
}

/// One-step update of the not-failed fraction when every failure lasts one
/// step: N_f + p_p (1 - N_f).
pub fn not_failed_fraction_next(n_f: f64, p_p: f64) -> f64 {
    n_f + p_p * (1.0 - n_f)
}

/// Protection corrected for link-borne threat from `n_f` failed nodes:
/// p'_p = 1 - (1 - p_p)(1 - (1 - x)^N_f), with x = p_l * p_ER.
///
/// No failed nodes means no propagated threat, so the result is 1.
pub fn effective_protection(p_p: f64, x: f64, n_f: u32) -> f64 {
    1.0 - (1.0 - p_p) * (1.0 - (1.0 - x).powi(n_f as i32))
}

/// Which solution of 1 + p'_p (1 - f_p - f_m) c = c to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapitalMode {
    /// One iteration from c = 1.
    OneStep,
    /// The self-consistent fixed point 1 / (1 - p'_p (1 - f_p - f_m)).
    FixedPoint,
}

/// Stationary capital under effective protection `p_p_eff`.
pub fn stationary_capital(p_p_eff: f64, f_p: f64, f_m: f64, mode: CapitalMode) -> Result<f64> {
    if f_p + f_m > 1.0 {
        return Err(Error::invalid(
            "f_p",
            format!("f_p + f_m = {} exceeds 1", f_p + f_m),
        ));
    }
    let product = p_p_eff * (1.0 - f_p - f_m);
    match mode {
        CapitalMode::OneStep => Ok(1.0 + product),
        CapitalMode::FixedPoint => {
            if product >= 1.0 {
                Err(Error::NoStationaryCapital { product })
            } else {
                Ok(1.0 / (1.0 - product))
            }
        }
    }
}

/// Exact binomial pmf P(X = r) = C(n, r) p^r (1 - p)^(n - r).
pub fn binomial_failure_pmf(n: u32, r: u32, p: f64) -> Result<f64> {
    if r > n {
        return Err(Error::invalid("r", format!("{r} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("{p} outside [0, 1]")));
    }
    Ok(binomial_coefficient(n as u64, r as u64)
        * p.powi(r as i32)
        * (1.0 - p).powi((n - r) as i32))
}

/// Network-effect curve f'(x) = c - k/x: strictly increasing, concave, with
/// asymptote c.
pub fn network_effect_curve(k: f64, c: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::invalid("x", format!("{x} outside the domain x > 0")));
    }
    Ok(c - k / x)
}

/// Bundled mean-field outputs for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldResult {
    /// Stationary probability of state A.
    pub p_a: f64,
    /// Stationary probability of state B.
    pub p_b: f64,
    /// Effective protection p'_p.
    pub p_p_eff: f64,
    /// Capital after one iteration from c = 1.
    pub c_one_step: f64,
    /// Fixed-point capital; `None` when the recursion diverges.
    pub c_fixed_point: Option<f64>,
}

/// Evaluates the whole mean-field chain: the stationary pair from
/// (gamma, beta), effective protection from (p_p, x, n_f), and both
/// stationary-capital readings from (f_p, f_m).
pub fn mean_field(
    gamma: f64,
    beta: f64,
    p_p: f64,
    x: f64,
    n_f: u32,
    f_p: f64,
    f_m: f64,
) -> Result<MeanFieldResult> {
    let (p_a, p_b) = markov_stationary(gamma, beta)?;
    let p_p_eff = effective_protection(p_p, x, n_f);
    let c_one_step = stationary_capital(p_p_eff, f_p, f_m, CapitalMode::OneStep)?;
    let c_fixed_point = stationary_capital(p_p_eff, f_p, f_m, CapitalMode::FixedPoint).ok();
    Ok(MeanFieldResult {
        p_a,
        p_b,
        p_p_eff,
        c_one_step,
        c_fixed_point,
    })
}
