//! Deterministic file output: CSV with a fixed column order and 9
//! significant digits for floats, JSON with stable key order, and atomic
//! writes (temp file + rename) so failed runs never leave partial output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::harness::{RobustnessReport, SweepReport};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Formats a float with 9 significant digits: plain decimal notation in a
/// readable magnitude range, scientific outside it.
pub fn sig9(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return if value.is_nan() {
            "nan".to_string()
        } else if value > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let magnitude = value.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        let s = format!("{value:.8e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0');
        let mantissa = mantissa.strip_suffix('.').unwrap_or(mantissa);
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{value:.decimals$}");
    // trim trailing zeros but keep at least one digit after the point
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0');
        let trimmed = trimmed.strip_suffix('.').unwrap_or(trimmed);
        trimmed.to_string()
    } else {
        s
    }
}

fn opt_bool(value: Option<bool>) -> String {
    match value {
        Some(true) => "true".to_string(),
        Some(false) => "false".to_string(),
        None => String::new(),
    }
}

fn opt_sig9(value: Option<f64>) -> String {
    value.map(sig9).unwrap_or_default()
}

/// Writes `content` to `path` atomically: the data lands in a temporary
/// file in the same directory and is renamed into place.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), ReportError> {
    let wrap = |source: std::io::Error| ReportError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(wrap)?;
    }
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new("."))).map_err(wrap)?;
    tmp.write_all(content).map_err(wrap)?;
    tmp.flush().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

/// Pretty-printed JSON with a trailing newline; key order follows the
/// struct definitions.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, ReportError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ReportError> {
    write_atomic(path, &to_json_bytes(value)?)
}

/// Sweep rows as CSV: one row per grid configuration, columns documented in
/// the header line.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str(
        "config_index,productivity,returns_exponent,effort_cost,team_size,loyalty,\
         effort,effort_unclamped,total_effort,output,utility,converged,at_cap,\
         baseline_ok,monotone_ok,differentiation_ratio,differentiation_ok,\
         team_size_ok,synergy_ratio,synergy_ok,bounded_ok\n",
    );
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.config_index,
            sig9(row.productivity),
            sig9(row.returns_exponent),
            sig9(row.effort_cost),
            row.team_size,
            sig9(row.loyalty),
            sig9(row.effort),
            sig9(row.effort_unclamped),
            sig9(row.total_effort),
            sig9(row.output),
            sig9(row.utility),
            row.converged,
            row.at_cap,
            row.baseline_ok,
            row.monotone_ok,
            sig9(row.differentiation_ratio),
            row.differentiation_ok,
            opt_bool(row.team_size_ok),
            opt_sig9(row.synergy_ratio),
            opt_bool(row.synergy_ok),
            row.bounded_ok,
        ));
    }
    out
}

/// Robustness trials as CSV.
pub fn robustness_csv(report: &RobustnessReport) -> String {
    let mut out = String::new();
    out.push_str(
        "trial,productivity,returns_exponent,effort_cost,team_size,loyalty_benefit,\
         cost_tolerance,low_loyalty,high_loyalty,monotone_ok,differentiation_ratio\n",
    );
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.trial,
            sig9(row.productivity),
            sig9(row.returns_exponent),
            sig9(row.effort_cost),
            row.team_size,
            sig9(row.loyalty_benefit),
            sig9(row.cost_tolerance),
            sig9(row.low_loyalty),
            sig9(row.high_loyalty),
            row.monotone_ok,
            sig9(row.differentiation_ratio),
        ));
    }
    out
}

/// Loyalty-evolution trajectory in long format: one row per (period, member).
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::new();
    out.push_str("period,member,loyalty,effort,output\n");
    for step in &trajectory.steps {
        for (member, (&loyalty, &effort)) in step.loyalties.iter().zip(&step.efforts).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                step.period,
                member,
                sig9(loyalty),
                sig9(effort),
                sig9(step.output),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(0.128), "0.128");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(15.2550395), "15.2550395");
        assert_eq!(sig9(0.123456789123), "0.123456789");
        assert_eq!(sig9(-2.5), "-2.5");
        assert_eq!(sig9(123456789.123), "123456789");
        assert_eq!(sig9(f64::INFINITY), "inf");
        // 9 significant digits of pi
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig9(0.00012345678949), "0.000123456789");
        // far from 1: scientific with 9 significant digits
        assert_eq!(sig9(0.000012345678949), "1.23456789e-5");
        assert_eq!(sig9(1.08486187e-139), "1.08486187e-139");
        assert_eq!(sig9(-2.5e-9), "-2.5e-9");
        assert_eq!(sig9(3.0e20), "3e20");
    }

    #[test]
    fn atomic_write_creates_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("out.txt");
        write_atomic(&path, b"one").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "one");
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
    }

    #[test]
    fn trajectory_csv_long_format() {
        use crate::dynamics::{Trajectory, TrajectoryStep};
        let t = Trajectory {
            steps: vec![TrajectoryStep {
                period: 0,
                loyalties: vec![0.1, 0.2],
                efforts: vec![1.0, 2.0],
                output: 16.0,
                solver_converged: true,
            }],
        };
        let csv = trajectory_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0,0,0.1,1,16");
        assert_eq!(lines[2], "0,1,0.2,2,16");
    }
}
