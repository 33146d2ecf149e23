//! Deterministic report files: CSV time series and JSON summaries.
//!
//! All floats are written with 17 significant digits ('.' decimal, LF line
//! endings), so identical configurations produce byte-identical CSVs.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

/// 17-significant-digit scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `profile.csv`: one row per sampled time of the rescaled semigroup.
pub fn write_profile_csv(path: &Path, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    let mut text = String::from("t,distance,min_entry\n");
    for &(t, distance, min_entry) in rows {
        text.push_str(&fmt_f64(t));
        text.push(',');
        text.push_str(&fmt_f64(distance));
        text.push(',');
        text.push_str(&fmt_f64(min_entry));
        text.push('\n');
    }
    std::fs::write(path, text)
}

/// `scalars.csv`: every number of the summary in long key,value form,
/// sorted by key.
pub fn write_scalars_csv(path: &Path, entries: &BTreeMap<String, f64>) -> io::Result<()> {
    let mut text = String::from("key,value\n");
    for (key, value) in entries {
        text.push_str(key);
        text.push(',');
        text.push_str(&fmt_f64(*value));
        text.push('\n');
    }
    std::fs::write(path, text)
}

/// One sweep row: parameter value, spectral data, optional fit and
/// positivity time, and a status marker (`ok` or `error:<stage>`).
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRowOut {
    pub value: f64,
    pub lambda0: Option<f64>,
    pub gap: Option<f64>,
    pub delta_fit: Option<f64>,
    pub t1: Option<f64>,
    pub status: String,
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRowOut]) -> io::Result<()> {
    let mut text = String::from("value,lambda0,gap,delta_fit,t1,status\n");
    for row in rows {
        text.push_str(&fmt_f64(row.value));
        text.push(',');
        text.push_str(&fmt_opt(row.lambda0));
        text.push(',');
        text.push_str(&fmt_opt(row.gap));
        text.push(',');
        text.push_str(&fmt_opt(row.delta_fit));
        text.push(',');
        text.push_str(&fmt_opt(row.t1));
        text.push(',');
        text.push_str(&row.status);
        text.push('\n');
    }
    std::fs::write(path, text)
}
