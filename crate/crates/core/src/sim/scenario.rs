//! Scenario definitions and the built-in scenario set.

use super::reference::{self, CircleSpec, Waypoint};
use crate::control::{GraspOptions, GraspTarget, LockedAngles, ModeKind, Setpoint6D, TargetKind};
use crate::dynamics::{VehicleParams, VehicleState};
use crate::error::{Error, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Reference generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reference {
    Hover {
        /// Inertial position, z down (m).
        position: [f64; 3],
        #[serde(default)]
        yaw_deg: f64,
    },
    Circle(CircleSpec),
    /// Jump from `from` to `to` at `time`.
    Step { from: [f64; 3], to: [f64; 3], time: f64 },
    Waypoints {
        points: Vec<Waypoint>,
        #[serde(default)]
        yaw_deg: f64,
    },
    /// Hold a position while commanding an attitude from `start` on.
    AttitudeHold {
        position: [f64; 3],
        attitude_deg: [f64; 3],
        #[serde(default)]
        start: f64,
    },
    /// Scripted approach, grasp, perch, takeoff and release.
    GraspPerch {
        /// Inertial position of the target reference point (m).
        target_position: [f64; 3],
        target: GraspTarget,
        #[serde(default)]
        options: GraspOptions,
        /// Time spent attached (s).
        #[serde(default = "default_perch_time")]
        perch_time: f64,
    },
}

fn default_perch_time() -> f64 {
    3.0
}

impl Reference {
    /// Setpoint at `t` for every generator except the grasp/perch script,
    /// whose path is produced by [`super::run::grasp_perch_script`].
    pub fn setpoint(&self, t: f64) -> Option<Setpoint6D> {
        Some(match self {
            Reference::Hover { position, yaw_deg } => Setpoint6D {
                position: Vector3::from(*position),
                velocity: Vector3::zeros(),
                attitude: Vector3::new(0.0, 0.0, yaw_deg.to_radians()),
            },
            Reference::Circle(c) => reference::reference_circle(t, c),
            Reference::Step { from, to, time } => {
                Setpoint6D::hold(Vector3::from(if t < *time { *from } else { *to }))
            }
            Reference::Waypoints { points, yaw_deg } => {
                reference::waypoint_setpoint(t, points, yaw_deg.to_radians())
            }
            Reference::AttitudeHold {
                position,
                attitude_deg,
                start,
            } => Setpoint6D {
                position: Vector3::from(*position),
                velocity: Vector3::zeros(),
                attitude: if t < *start {
                    Vector3::zeros()
                } else {
                    Vector3::from(attitude_deg.map(f64::to_radians))
                },
            },
            Reference::GraspPerch { .. } => return None,
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Scenario(m.into()));
        match self {
            Reference::Circle(c) => {
                if !(c.radius > 0.0) {
                    return bad("circle radius must be > 0");
                }
                if !(c.period > 0.0) {
                    return bad("circle period must be > 0");
                }
            }
            Reference::Waypoints { points, .. } => {
                if points.is_empty() {
                    return bad("waypoint list is empty");
                }
                if points.windows(2).any(|w| !(w[1].time > w[0].time)) {
                    return bad("waypoint times must be strictly increasing");
                }
            }
            Reference::GraspPerch { perch_time, .. } if !(*perch_time >= 0.0) => {
                return bad("perch_time must be >= 0");
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceKind {
    /// Body wrench held over `[start, end)`.
    #[default]
    Constant,
    /// Body impulse (N s, N m s) delivered over the single step at `start`.
    Impulse,
}

/// Body-frame wrench offset plus optional seeded Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Disturbance {
    pub kind: DisturbanceKind,
    pub force: [f64; 3],
    pub moment: [f64; 3],
    pub start: f64,
    pub end: f64,
    /// Per-step standard deviation of force noise (N); 0 disables noise.
    pub noise_force_std: f64,
    pub noise_moment_std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEvent {
    pub time: f64,
    pub mode: ModeKind,
}

/// Preferred fully-actuated nozzle shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// Minimal-norm allocation.
    Release,
    Bilateral { bend_deg: f64 },
    RadialInward { bend_deg: f64 },
    Uniform { bend_deg: f64, azimuth_deg: f64 },
    /// Per-nozzle (bend, azimuth) in degrees.
    Custom { angles_deg: [[f64; 2]; 4] },
}

impl ShapeSpec {
    pub fn angles(&self) -> Option<LockedAngles> {
        let r = f64::to_radians;
        match *self {
            ShapeSpec::Release => None,
            ShapeSpec::Bilateral { bend_deg } => Some(LockedAngles::bilateral(r(bend_deg))),
            ShapeSpec::RadialInward { bend_deg } => Some(LockedAngles::radial_inward(r(bend_deg))),
            ShapeSpec::Uniform {
                bend_deg,
                azimuth_deg,
            } => Some(LockedAngles::uniform(r(bend_deg), r(azimuth_deg))),
            ShapeSpec::Custom { angles_deg } => Some(LockedAngles(angles_deg.map(|[b, a]| (r(b), r(a))))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeEvent {
    pub time: f64,
    pub shape: ShapeSpec,
}

/// Explicit initial state; angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialState {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub attitude_deg: [f64; 3],
    /// rad/s
    pub rates: [f64; 3],
}

impl InitialState {
    pub fn state(&self) -> VehicleState {
        VehicleState {
            position: Vector3::from(self.position),
            velocity: Vector3::from(self.velocity),
            attitude: Vector3::from(self.attitude_deg.map(f64::to_radians)),
            rates: Vector3::from(self.rates),
        }
    }
}

fn default_dt() -> f64 {
    1e-3
}
fn default_true() -> bool {
    true
}
fn default_settle() -> f64 {
    0.05
}
fn default_switch_window() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// s
    pub duration: f64,
    /// Integration step (s).
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Starts on the reference at t = 0 when absent.
    #[serde(default)]
    pub initial: Option<InitialState>,
    pub reference: Reference,
    #[serde(default)]
    pub disturbance: Option<Disturbance>,
    #[serde(default)]
    pub mode_schedule: Vec<ModeEvent>,
    #[serde(default)]
    pub shape_schedule: Vec<ShapeEvent>,
    #[serde(default)]
    pub seed: u64,
    /// Tracking metrics ignore samples before this time (s).
    #[serde(default)]
    pub metrics_from: f64,
    /// Position error defining the settling time (m).
    #[serde(default = "default_settle")]
    pub settle_tolerance: f64,
    /// Window after each mode switch for the deviation metrics (s).
    #[serde(default = "default_switch_window")]
    pub switch_window: f64,
    /// With the controller off all rotors are stopped.
    #[serde(default = "default_true")]
    pub controller_enabled: bool,
}

impl Scenario {
    pub fn new(name: &str, duration: f64, reference: Reference) -> Self {
        Self {
            name: name.into(),
            duration,
            dt: default_dt(),
            initial: None,
            reference,
            disturbance: None,
            mode_schedule: Vec::new(),
            shape_schedule: Vec::new(),
            seed: 0,
            metrics_from: 0.0,
            settle_tolerance: default_settle(),
            switch_window: default_switch_window(),
            controller_enabled: true,
        }
    }

    /// Number of integration steps.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self, params: &VehicleParams) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(format!("{}: {m}", self.name)));
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return bad("duration must be > 0".into());
        }
        if !(self.dt > 0.0) || self.dt > crate::dynamics::MAX_STEP {
            return bad(format!("dt must be in (0, {}]", crate::dynamics::MAX_STEP));
        }
        if self.steps() == 0 {
            return bad("duration shorter than one step".into());
        }
        if !(self.settle_tolerance > 0.0) || !(self.switch_window > 0.0) {
            return bad("settle_tolerance and switch_window must be > 0".into());
        }
        self.reference.validate().or_else(|e| bad(e.to_string()))?;
        if let Some(d) = &self.disturbance {
            if !(d.noise_force_std >= 0.0) || !(d.noise_moment_std >= 0.0) {
                return bad("noise standard deviations must be >= 0".into());
            }
            if d.kind == DisturbanceKind::Constant && d.end < d.start {
                return bad("disturbance end precedes start".into());
            }
        }
        if self.mode_schedule.windows(2).any(|w| w[1].time < w[0].time)
            || self.shape_schedule.windows(2).any(|w| w[1].time < w[0].time)
        {
            return bad("schedules must be sorted by time".into());
        }
        for ev in &self.shape_schedule {
            if let Some(a) = ev.shape.angles() {
                a.validate(params).or_else(|e| bad(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Built-in scenario by name.
    pub fn builtin(name: &str) -> Option<Scenario> {
        let hover_at = [0.0, 0.0, -1.0];
        Some(match name {
            "hover" => Scenario::new(
                "hover",
                10.0,
                Reference::Hover {
                    position: hover_at,
                    yaw_deg: 0.0,
                },
            ),
            "circle" => Scenario {
                metrics_from: 12.0,
                ..Scenario::new("circle", 36.0, Reference::Circle(CircleSpec::default()))
            },
            "pitch_hold" => Scenario {
                metrics_from: 1.0,
                ..Scenario::new(
                    "pitch_hold",
                    10.0,
                    Reference::AttitudeHold {
                        position: hover_at,
                        attitude_deg: [0.0, 10.0, 0.0],
                        start: 1.0,
                    },
                )
            },
            "step" => Scenario::new(
                "step",
                8.0,
                Reference::Step {
                    from: hover_at,
                    to: [1.0, 0.0, -1.0],
                    time: 1.0,
                },
            ),
            "mode_switch" => Scenario {
                shape_schedule: vec![
                    ShapeEvent {
                        time: 1.0,
                        shape: ShapeSpec::Bilateral { bend_deg: 20.0 },
                    },
                    ShapeEvent {
                        time: 11.0,
                        shape: ShapeSpec::Release,
                    },
                ],
                mode_schedule: vec![
                    ModeEvent {
                        time: 4.0,
                        mode: ModeKind::GraspPerch,
                    },
                    ModeEvent {
                        time: 8.0,
                        mode: ModeKind::FullyActuated,
                    },
                ],
                ..Scenario::new(
                    "mode_switch",
                    14.0,
                    Reference::Hover {
                        position: hover_at,
                        yaw_deg: 0.0,
                    },
                )
            },
            "grasp_perch" => Scenario::new(
                "grasp_perch",
                26.0,
                Reference::GraspPerch {
                    target_position: [1.0, 1.0, -0.5],
                    target: GraspTarget::new(TargetKind::Tube, 0.05, 0.12),
                    options: GraspOptions::default(),
                    perch_time: default_perch_time(),
                },
            ),
            "free_fall" => Scenario {
                controller_enabled: false,
                initial: Some(InitialState {
                    position: [0.0, 0.0, -10.0],
                    ..Default::default()
                }),
                ..Scenario::new(
                    "free_fall",
                    1.0,
                    Reference::Hover {
                        position: [0.0, 0.0, -10.0],
                        yaw_deg: 0.0,
                    },
                )
            },
            _ => return None,
        })
    }

    pub const BUILTIN: [&'static str; 7] = [
        "hover",
        "circle",
        "pitch_hold",
        "step",
        "mode_switch",
        "grasp_perch",
        "free_fall",
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        let p = VehicleParams::default();
        for name in Scenario::BUILTIN {
            let s = Scenario::builtin(name).unwrap();
            assert_eq!(s.name, name);
            s.validate(&p).unwrap();
        }
        assert!(Scenario::builtin("nope").is_none());
    }

    #[test]
    fn invalid_scenarios_rejected() {
        let p = VehicleParams::default();
        let mut s = Scenario::builtin("circle").unwrap();
        s.reference = Reference::Circle(CircleSpec {
            radius: 0.0,
            ..Default::default()
        });
        assert!(matches!(s.validate(&p), Err(Error::Scenario(_))));
        let mut s = Scenario::builtin("hover").unwrap();
        s.dt = 0.0;
        assert!(s.validate(&p).is_err());
        s.dt = 1e-3;
        s.duration = -1.0;
        assert!(s.validate(&p).is_err());
    }

    #[test]
    fn step_reference_switches() {
        let r = Reference::Step {
            from: [0.0; 3],
            to: [1.0, 0.0, 0.0],
            time: 2.0,
        };
        assert_eq!(r.setpoint(1.999).unwrap().position.x, 0.0);
        assert_eq!(r.setpoint(2.0).unwrap().position.x, 1.0);
    }
}
