//! Bit-stable CSV and key-value emission.
//!
//! All numeric cells are fixed at six decimal places, delimiters are commas,
//! line endings are `\n`, and undefined coefficients of variation are
//! written as empty cells, so identical inputs always produce identical
//! bytes.

use cascade_core::{MeanFieldResult, SweepPoint, TimeSeriesRecord};

pub const SERIES_HEADER: &str =
    "t,failure_fraction,mean_capital,mean_fp0,mean_fp1,cv_fp0,cv_fp1,mean_fp,mean_pp";
pub const SWEEP_HEADER: &str =
    "axis_value,fixed_mean_failure,fixed_mean_capital,fixed_mean_fp0,fixed_mean_fp1,converged";

fn cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}

pub fn series_csv(series: &[TimeSeriesRecord]) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in series {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{:.6}\n",
            r.t,
            r.failure_fraction,
            r.mean_capital,
            r.mean_fp0,
            r.mean_fp1,
            cell(r.cv_fp0),
            cell(r.cv_fp1),
            r.mean_fp,
            r.mean_pp,
        ));
    }
    out
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
            p.axis_value,
            p.stationary.fixed_mean_failure,
            p.stationary.fixed_mean_capital,
            p.stationary.fixed_mean_fp0,
            p.stationary.fixed_mean_fp1,
            p.stationary.converged,
        ));
    }
    out
}

/// Flat key-value block of the mean-field oracle outputs, suitable for
/// diffing against golden files.
pub fn oracle_block(mf: &MeanFieldResult) -> String {
    let fixed = mf
        .c_fixed_point
        .map(|v| format!("{v:.6}"))
        .unwrap_or_else(|| "divergent".to_string());
    format!(
        "p_A = {:.6}\np_B = {:.6}\np_p_eff = {:.6}\nc_one_step = {:.6}\nc_fixed_point = {}\n",
        mf.p_a, mf.p_b, mf.p_p_eff, mf.c_one_step, fixed
    )
}
