//! CSV trajectory logs and JSON metrics.
//!
//! Log layout: a `# svpn-log v1 ...` stamp line, the fixed header
//! [`HEADER`], then one row per kept step. Floats are written as
//! `d.dddddddde[-]x` (9 significant digits). `mode` is 0 (fully actuated),
//! 1 (grasp/perch) or 2 (perched); `clampN` holds the clamp bits of nozzle N
//! (1 bend, 2 low speed, 4 high speed, 8 infeasible). Angles are radians,
//! `omegaN` is rad/s.

use serde::Serialize;
use std::io::{Read, Write};
use std::path::Path;
use svpn_core::sim::log::LogMode;
use svpn_core::sim::{MetricSample, TrajectoryLog};
use svpn_core::nalgebra::Vector3;
use svpn_core::{Metrics, Scenario};

pub const LOG_VERSION: &str = "svpn-log v1";
pub const METRICS_VERSION: &str = "svpn-metrics v1";

pub const HEADER: [&str; 30] = [
    "t", "x", "y", "z", "x_d", "y_d", "z_d", "phi", "theta", "psi", "p", "q", "r", "mode", "alpha1", "beta1",
    "omega1", "alpha2", "beta2", "omega2", "alpha3", "beta3", "omega3", "alpha4", "beta4", "omega4", "clamp1",
    "clamp2", "clamp3", "clamp4",
];

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed log: {0}")]
    Format(String),
}

pub fn fmt_float(v: f64) -> String {
    // no "-0" in logs
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

/// Write the log, keeping every `decimation`-th record.
pub fn write_log<W: Write>(log: &TrajectoryLog, decimation: usize, mut out: W) -> Result<(), ExportError> {
    writeln!(
        out,
        "# {LOG_VERSION} scenario={} dt={} decimation={}",
        log.name,
        fmt_float(log.dt),
        decimation.max(1)
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let mut row: Vec<String> = Vec::with_capacity(HEADER.len());
    for r in log.records.iter().step_by(decimation.max(1)) {
        row.clear();
        let s = &r.state;
        row.push(fmt_float(r.t));
        for v in s.position.iter().chain(r.setpoint.position.iter()).chain(s.attitude.iter()).chain(s.rates.iter()) {
            row.push(fmt_float(*v));
        }
        row.push(r.mode.code().to_string());
        for c in &r.commands {
            row.push(fmt_float(c.bend));
            row.push(fmt_float(c.azimuth));
            row.push(fmt_float(c.speed));
        }
        for c in &r.commands {
            row.push(c.clamp.bits().to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_log(log: &TrajectoryLog, decimation: usize, path: &Path) -> Result<(), ExportError> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_log(log, decimation, f)
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub values: [f64; 30],
}

impl CsvRow {
    pub fn get(&self, column: &str) -> f64 {
        let i = HEADER.iter().position(|h| *h == column).expect("known column");
        self.values[i]
    }

    pub fn metric_sample(&self) -> Result<MetricSample, ExportError> {
        let mode = LogMode::from_code(self.get("mode") as u8)
            .ok_or_else(|| ExportError::Format(format!("bad mode {}", self.get("mode"))))?;
        let v = |a: &str, b: &str, c: &str| Vector3::new(self.get(a), self.get(b), self.get(c));
        Ok(MetricSample {
            t: self.get("t"),
            position: v("x", "y", "z"),
            position_sp: v("x_d", "y_d", "z_d"),
            attitude: v("phi", "theta", "psi"),
            mode,
            clamped: (1..=4).any(|i| self.get(&format!("clamp{i}")) != 0.0),
        })
    }
}

/// Parse a log written by [`write_log`]; returns the stamp line and rows.
pub fn read_log<R: Read>(mut input: R) -> Result<(String, Vec<CsvRow>), ExportError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (stamp, body) = text
        .split_once('\n')
        .ok_or_else(|| ExportError::Format("missing stamp line".into()))?;
    if !stamp.starts_with(&format!("# {LOG_VERSION}")) {
        return Err(ExportError::Format(format!("unexpected stamp {stamp:?}")));
    }
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != HEADER {
        return Err(ExportError::Format("header mismatch".into()));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let mut values = [0.0; 30];
        for (i, field) in rec.iter().enumerate() {
            values[i] = field
                .parse()
                .map_err(|_| ExportError::Format(format!("bad number {field:?}")))?;
        }
        rows.push(CsvRow { values });
    }
    Ok((stamp.to_string(), rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionSummary {
    pub time: f64,
    pub from: svpn_core::control::ModeKind,
    pub to: svpn_core::control::ModeKind,
    pub force_z_jump: Option<f64>,
    pub wrench_jump: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsDocument<'a> {
    pub format: &'static str,
    pub scenario: &'a str,
    pub seed: u64,
    pub dt: f64,
    pub duration: f64,
    pub metrics: &'a Metrics,
    pub transitions: Vec<TransitionSummary>,
}

pub fn metrics_document<'a>(scenario: &'a Scenario, log: &TrajectoryLog, metrics: &'a Metrics) -> MetricsDocument<'a> {
    MetricsDocument {
        format: METRICS_VERSION,
        scenario: &scenario.name,
        seed: scenario.seed,
        dt: scenario.dt,
        duration: scenario.duration,
        metrics,
        transitions: log
            .transitions
            .iter()
            .map(|t| TransitionSummary {
                time: t.time,
                from: t.from,
                to: t.to,
                force_z_jump: t.force_z_jump,
                wrench_jump: t.wrench_jump,
            })
            .collect(),
    }
}

pub fn write_metrics<W: Write>(doc: &MetricsDocument, mut out: W) -> Result<(), ExportError> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn export_metrics(doc: &MetricsDocument, path: &Path) -> Result<(), ExportError> {
    write_metrics(doc, std::io::BufWriter::new(std::fs::File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000e0");
        assert_eq!(fmt_float(-0.0123456789), "-1.23456789e-2");
        assert_eq!(fmt_float(2.0 / 3.0).parse::<f64>().unwrap(), 0.666666667);
    }

    #[test]
    fn empty_log_is_header_only() {
        let mut buf = Vec::new();
        write_log(&TrajectoryLog::new("e", 1e-3), 1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("# svpn-log v1 scenario=e"));
        assert_eq!(lines[1], HEADER.join(","));
        let (_, rows) = read_log(text.as_bytes()).unwrap();
        assert!(rows.is_empty());
    }
}
