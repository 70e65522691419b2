//! Deterministic text output: 9-significant-digit number formatting and the
//! CSV writers for tuning curves, spectral slices, maps, and ratio tables.
//!
//! Every artifact starts with `#` comment lines that embed the effective
//! configuration, so a file is reproducible from its own header.

use std::fmt::Write as _;

use crate::qpm::{TuningCurve, TuningRow};
use crate::real::Real;
use crate::spectrum::{BandwidthRatioTable, SpectralMap, SpectrumSlice};

/// Significant digits used for all numeric CSV output.
pub const CSV_SIG_DIGITS: usize = 9;

/// Format with 9 significant digits, trimming trailing zeros (printf `%.9g`
/// semantics, with a bare `e` exponent).
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", CSV_SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format always has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let trim = |s: &str| {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t.is_empty() || t == "-" {
            "0".to_string()
        } else {
            t.to_string()
        }
    };
    if exp >= -4 && exp < CSV_SIG_DIGITS as i32 {
        let decimals = (CSV_SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn fmt_r<R: Real>(x: R) -> String {
    fmt_sig(x.to_f64().unwrap_or(f64::NAN))
}

fn push_comments(out: &mut String, comments: &[String]) {
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
}

/// Tuning-curve CSV: one row per solution, `NA`-filled rows for (axis, order)
/// combinations without a root, `#` comment lines for per-row solver notes.
pub fn render_tuning_csv<R: Real>(curve: &TuningCurve<R>, comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    out.push_str("axis_value,order_m,lambda_s_nm,lambda_i_nm,period_um,theta_deg,residual,feasible\n");
    let mut orders = curve.orders.clone();
    orders.sort_unstable();
    for row in &curve.rows {
        render_tuning_row(&mut out, row, &orders);
    }
    out
}

fn render_tuning_row<R: Real>(out: &mut String, row: &TuningRow<R>, orders: &[i32]) {
    if let Some(note) = &row.note {
        let _ = writeln!(out, "# axis={}: {note}", fmt_r(row.axis_value));
    }
    for &m in orders {
        let solutions: Vec<_> = row.solutions.iter().filter(|s| s.order == m).collect();
        if solutions.is_empty() {
            let _ = writeln!(out, "{},{m},NA,NA,NA,NA,NA,NA", fmt_r(row.axis_value));
            continue;
        }
        for s in solutions {
            let _ = writeln!(
                out,
                "{},{m},{},{},{},{},{},{}",
                fmt_r(row.axis_value),
                fmt_r(s.lambda_s_nm),
                fmt_r(s.lambda_i_nm),
                fmt_sig(s.period_m.to_f64().unwrap_or(f64::NAN) * 1e6),
                fmt_r(s.theta_deg),
                fmt_r(s.residual),
                s.feasible_poling,
            );
        }
    }
}

/// Spectral-slice CSV with the derived quantities in the header comments.
pub fn render_slice_csv<R: Real>(slice: &SpectrumSlice<R>, comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    let _ = writeln!(out, "# config = {}", slice.fingerprint);
    let _ = writeln!(out, "# beta_mode = {}", slice.beta_mode.label());
    let _ = writeln!(out, "# clamp = {}", slice.clamp.label());
    let _ = writeln!(
        out,
        "# peak_lambda_nm = {}",
        slice.peak_lambda_nm.map_or("NA".to_string(), fmt_r)
    );
    let _ = writeln!(
        out,
        "# fwhm_nm = {}",
        slice.fwhm_nm.map_or("NA".to_string(), fmt_r)
    );
    if !slice.in_window_peak {
        let _ = writeln!(out, "# warning = no interior peak in window");
    }
    out.push_str("lambda_s_nm,intensity_norm\n");
    for (lambda, v) in slice.lambda_s_nm.iter().zip(&slice.intensity) {
        let _ = writeln!(out, "{},{}", fmt_r(*lambda), fmt_r(*v));
    }
    out
}

/// Map CSV: first row carries the wavelength grid, first column the angle
/// grid, body the globally normalized intensities.
pub fn render_map_csv<R: Real>(map: &SpectralMap<R>, comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    let _ = writeln!(out, "# config = {}", map.fingerprint);
    let _ = writeln!(out, "# failed_cells = {}", map.failed_cells);
    out.push(',');
    out.push_str(
        &map.lambda_s_nm
            .iter()
            .map(|l| fmt_r(*l))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for (theta, row) in map.theta_deg.iter().zip(&map.intensity) {
        out.push_str(&fmt_r(*theta));
        for v in row {
            out.push(',');
            out.push_str(&fmt_r(*v));
        }
        out.push('\n');
    }
    out
}

/// Bandwidth-ratio CSV, one row per central signal wavelength.
pub fn render_ratio_csv<R: Real>(table: &BandwidthRatioTable<R>, comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    let _ = writeln!(
        out,
        "# reference_lambda_nm = {}",
        fmt_r(table.reference_lambda_nm)
    );
    out.push_str("lambda_norm,lambda_s_nm,ratio_co,ratio_counter,fwhm_co_nm,fwhm_counter_nm\n");
    let na = || "NA".to_string();
    for row in &table.rows {
        if let Some(note) = &row.note {
            let _ = writeln!(out, "# lambda_s={}: {note}", fmt_r(row.lambda_s_nm));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_r(row.lambda_norm),
            fmt_r(row.lambda_s_nm),
            row.ratio_co.map_or_else(na, fmt_r),
            row.ratio_counter.map_or_else(na, fmt_r),
            row.fwhm_co_nm.map_or_else(na, fmt_r),
            row.fwhm_counter_nm.map_or_else(na, fmt_r),
        );
    }
    out
}
