//! Per-step trajectory log.

use super::metrics::MetricSample;
use crate::control::{ModeKind, NozzleCommand, Setpoint6D, TransitionRecord};
use crate::dynamics::{BodyWrench, VehicleState};
use serde::{Deserialize, Serialize};

/// Mode column of the log. `Perched` is grasp/perch with the body attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogMode {
    FullyActuated,
    GraspPerch,
    Perched,
}

impl LogMode {
    pub fn code(self) -> u8 {
        match self {
            LogMode::FullyActuated => 0,
            LogMode::GraspPerch => 1,
            LogMode::Perched => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => LogMode::FullyActuated,
            1 => LogMode::GraspPerch,
            2 => LogMode::Perched,
            _ => return None,
        })
    }

    pub fn kind(self) -> ModeKind {
        match self {
            LogMode::FullyActuated => ModeKind::FullyActuated,
            LogMode::GraspPerch | LogMode::Perched => ModeKind::GraspPerch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub t: f64,
    pub state: VehicleState,
    pub setpoint: Setpoint6D,
    /// Commanded body wrench.
    pub wrench: BodyWrench,
    pub commands: [NozzleCommand; 4],
    pub mode: LogMode,
    /// Inner-loop tick index when an inner tick fired on this step.
    pub ctrl_tick: Option<u64>,
}

impl LogRecord {
    pub fn clamped(&self) -> bool {
        self.commands.iter().any(|c| !c.clamp.is_empty())
    }

    pub fn metric_sample(&self) -> MetricSample {
        MetricSample {
            t: self.t,
            position: self.state.position,
            position_sp: self.setpoint.position,
            attitude: self.state.attitude,
            mode: self.mode,
            clamped: self.clamped(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub name: String,
    pub dt: f64,
    pub records: Vec<LogRecord>,
    pub transitions: Vec<TransitionRecord>,
}

impl TrajectoryLog {
    pub fn new(name: &str, dt: f64) -> Self {
        Self {
            name: name.into(),
            dt,
            records: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&LogRecord> {
        self.records.last()
    }

    pub fn samples(&self) -> Vec<MetricSample> {
        self.records.iter().map(LogRecord::metric_sample).collect()
    }

    /// Strictly increasing time at constant spacing.
    pub fn check_time_base(&self) -> Result<(), String> {
        for (k, w) in self.records.windows(2).enumerate() {
            let d = w[1].t - w[0].t;
            if !(d > 0.0) || (d - self.dt).abs() > 1e-9 * self.dt.max(1.0) {
                return Err(format!("record {} -> {}: spacing {d}", k, k + 1));
            }
        }
        Ok(())
    }

    /// Inner ticks appear once each, in order, with no gaps.
    pub fn check_ticks(&self) -> Result<(), String> {
        let mut expect = None;
        for r in &self.records {
            if let Some(k) = r.ctrl_tick {
                if let Some(e) = expect {
                    if k != e {
                        return Err(format!("tick {k} at t = {} where {e} was expected", r.t));
                    }
                }
                expect = Some(k + 1);
            }
        }
        Ok(())
    }
}
