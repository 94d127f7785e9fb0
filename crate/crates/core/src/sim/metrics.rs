//! Tracking metrics computed from logged samples.

use super::log::LogMode;
use crate::frame::wrap_pi;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// The subset of a log record the metrics depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub t: f64,
    pub position: Vector3<f64>,
    pub position_sp: Vector3<f64>,
    pub attitude: Vector3<f64>,
    pub mode: LogMode,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricOptions {
    /// Tracking metrics start here (s).
    pub from: f64,
    pub settle_tolerance: f64,
    pub switch_window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    /// Per-axis position RMSE over the tracking window (m).
    pub rmse: [f64; 3],
    pub max_position_error: f64,
    /// Over the whole run (rad).
    pub max_roll: f64,
    pub max_pitch: f64,
    /// Largest yaw excursion from the initial yaw (rad).
    pub yaw_drift: f64,
    /// Time after which the position error stays within tolerance (s).
    pub settling_time: f64,
    /// Largest altitude excursion within the window after any mode switch (m).
    pub switch_altitude_deviation: f64,
    /// Largest roll/pitch excursion within the window after any mode switch (rad).
    pub switch_attitude_deviation: f64,
    pub mode_switches: usize,
    /// Fraction of samples with any clamp flag raised.
    pub clamp_duty: f64,
    pub samples: usize,
}

impl Metrics {
    pub fn compute(samples: &[MetricSample], opts: &MetricOptions) -> Metrics {
        let mut m = Metrics {
            samples: samples.len(),
            ..Default::default()
        };
        let Some(first) = samples.first() else {
            return m;
        };
        let t_end = samples[samples.len() - 1].t;

        let mut sq = [0.0; 3];
        let mut n = 0usize;
        for s in samples.iter().filter(|s| s.t >= opts.from) {
            let e = s.position - s.position_sp;
            for a in 0..3 {
                sq[a] += e[a] * e[a];
            }
            m.max_position_error = m.max_position_error.max(e.norm());
            n += 1;
        }
        if n > 0 {
            m.rmse = sq.map(|v| (v / n as f64).sqrt());
        }

        let mut settle_from = None;
        for s in samples.iter().rev() {
            if (s.position - s.position_sp).norm() > opts.settle_tolerance {
                break;
            }
            settle_from = Some(s.t);
        }
        m.settling_time = match settle_from {
            Some(t) => t - first.t,
            None => t_end - first.t,
        };

        let yaw0 = first.attitude.z;
        let mut clamped = 0usize;
        for s in samples {
            m.max_roll = m.max_roll.max(s.attitude.x.abs());
            m.max_pitch = m.max_pitch.max(s.attitude.y.abs());
            m.yaw_drift = m.yaw_drift.max(wrap_pi(s.attitude.z - yaw0).abs());
            clamped += s.clamped as usize;
        }
        m.clamp_duty = clamped as f64 / samples.len() as f64;

        for k in 1..samples.len() {
            if samples[k].mode.kind() == samples[k - 1].mode.kind() {
                continue;
            }
            m.mode_switches += 1;
            let base = &samples[k - 1];
            for s in samples[k..]
                .iter()
                .take_while(|s| s.t <= base.t + opts.switch_window)
                .filter(|s| s.mode != LogMode::Perched)
            {
                m.switch_altitude_deviation = m.switch_altitude_deviation.max((s.position.z - base.position.z).abs());
                let d = (s.attitude.x - base.attitude.x)
                    .abs()
                    .max((s.attitude.y - base.attitude.y).abs());
                m.switch_attitude_deviation = m.switch_attitude_deviation.max(d);
            }
        }
        m
    }
}
