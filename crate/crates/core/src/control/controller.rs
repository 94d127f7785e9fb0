//! Cascaded multi-rate flight controller with fully-actuated and
//! locked-nozzle modes.
//!
//! Position and attitude loops run at the outer rate; velocity and body-rate
//! loops, allocation and mixing run at the inner rate. Commands are held
//! between inner ticks.

use super::allocation::{self, AllocationMatrix, NozzleForces};
use super::mixer::{self, ClampFlags, NozzleCommand};
use super::pid::{LoopGains, Pid3};
use super::underactuated::{self, LockedAngles};
use crate::dynamics::{BodyWrench, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::frame::{self, NOZZLE_COUNT};
use crate::kinematics::thrust_direction;
use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};

/// Gains of the four cascaded loops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSet {
    /// Position error (m) to velocity correction (m/s).
    pub position: LoopGains,
    /// Velocity error (m/s) to acceleration demand (m/s^2).
    pub velocity: LoopGains,
    /// Attitude error (rad) to body-rate setpoint (rad/s).
    pub attitude: LoopGains,
    /// Body-rate error (rad/s) to moment demand (N m).
    pub rate: LoopGains,
}

impl GainSet {
    pub fn fully_actuated() -> Self {
        Self {
            position: LoopGains {
                kp: [3.0, 3.0, 3.0],
                ki: [0.0; 3],
                kd: [0.0; 3],
                integral_limit: 1.0,
                output_limit: 3.0,
            },
            velocity: LoopGains {
                kp: [6.0, 6.0, 6.0],
                ki: [2.0, 2.0, 3.0],
                kd: [0.0; 3],
                integral_limit: 3.0,
                output_limit: 8.0,
            },
            attitude: LoopGains {
                kp: [8.0, 8.0, 4.0],
                ki: [1.0, 1.0, 0.5],
                kd: [0.0; 3],
                integral_limit: 0.5,
                output_limit: 4.0,
            },
            rate: LoopGains {
                kp: [0.25, 0.25, 0.3],
                ki: [0.2, 0.2, 0.2],
                kd: [0.0; 3],
                integral_limit: 0.2,
                output_limit: 1.0,
            },
        }
    }

    pub fn grasp_perch() -> Self {
        let fa = Self::fully_actuated();
        Self {
            position: LoopGains {
                kp: [1.2, 1.2, 3.0],
                ..fa.position
            },
            velocity: LoopGains {
                kp: [2.5, 2.5, 6.0],
                ki: [0.5, 0.5, 3.0],
                ..fa.velocity
            },
            ..fa
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        self.position.validate("position")?;
        self.velocity.validate("velocity")?;
        self.attitude.validate("attitude")?;
        self.rate.validate("rate")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerConfig {
    pub fully_actuated: GainSet,
    pub grasp_perch: GainSet,
    /// Position and attitude loop rate (Hz).
    pub outer_rate_hz: f64,
    /// Velocity and body-rate loop rate (Hz).
    pub inner_rate_hz: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            fully_actuated: GainSet::fully_actuated(),
            grasp_perch: GainSet::grasp_perch(),
            outer_rate_hz: 100.0,
            inner_rate_hz: 500.0,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        self.fully_actuated
            .validate()
            .map_err(|e| Error::Domain(format!("gains.fully_actuated.{e}")))?;
        self.grasp_perch
            .validate()
            .map_err(|e| Error::Domain(format!("gains.grasp_perch.{e}")))?;
        if !(self.outer_rate_hz > 0.0) || !(self.inner_rate_hz > 0.0) {
            return Err(Error::Domain("loop rates must be > 0".into()));
        }
        Ok(())
    }
}

/// Desired position (inertial, z down), velocity and attitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Setpoint6D {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: Vector3<f64>,
}

impl Setpoint6D {
    pub fn hold(position: Vector3<f64>) -> Self {
        Self {
            position,
            ..Default::default()
        }
    }

    pub fn validate(&self, params: &VehicleParams) -> Result<()> {
        if self.attitude.x.abs() > params.max_roll() * (1.0 + 1e-12)
            || self.attitude.y.abs() > params.max_pitch() * (1.0 + 1e-12)
        {
            return Err(Error::Domain(format!(
                "attitude setpoint ({:.4}, {:.4}) exceeds roll/pitch limits",
                self.attitude.x, self.attitude.y
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlMode {
    FullyActuated,
    GraspPerch { locked: LockedAngles },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    FullyActuated,
    GraspPerch,
}

impl ModeKind {
    pub fn code(self) -> u8 {
        match self {
            ModeKind::FullyActuated => 0,
            ModeKind::GraspPerch => 1,
        }
    }
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ModeKind::FullyActuated),
            1 => Some(ModeKind::GraspPerch),
            _ => None,
        }
    }
}

impl ControlMode {
    pub fn kind(&self) -> ModeKind {
        match self {
            ControlMode::FullyActuated => ModeKind::FullyActuated,
            ControlMode::GraspPerch { .. } => ModeKind::GraspPerch,
        }
    }
}

/// Resolve a mode request. Entering grasp/perch locks the nozzles at their
/// current commanded angles.
pub fn mode_switch(
    current: &ControlMode,
    requested: ModeKind,
    commands: &[NozzleCommand; 4],
    params: &VehicleParams,
) -> Result<ControlMode> {
    match (current, requested) {
        (ControlMode::FullyActuated, ModeKind::GraspPerch) => {
            let locked = LockedAngles(std::array::from_fn(|i| (commands[i].bend, commands[i].azimuth)));
            locked.validate(params)?;
            underactuated::check_controllable(&locked, params).map_err(|e| match e {
                Error::SingularConfig { det } => Error::SwitchRejected(format!(
                    "locked configuration has no full moment authority (normalized det {det:e})"
                )),
                other => other,
            })?;
            Ok(ControlMode::GraspPerch { locked })
        }
        (ControlMode::GraspPerch { .. }, ModeKind::FullyActuated) => Ok(ControlMode::FullyActuated),
        (m, _) => Ok(*m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRecord {
    pub time: f64,
    pub from: ModeKind,
    pub to: ModeKind,
    /// Commanded body `F_z` after minus before the switch (N).
    pub force_z_jump: Option<f64>,
    /// Norm of the commanded wrench change across the switch.
    pub wrench_jump: Option<f64>,
}

/// Controller outputs held between inner ticks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub wrench: BodyWrench,
    pub forces: NozzleForces,
    pub commands: [NozzleCommand; 4],
    pub attitude_setpoint: Vector3<f64>,
}

impl ControlOutput {
    pub fn idle(params: &VehicleParams) -> Self {
        Self {
            wrench: BodyWrench::default(),
            forces: NozzleForces::zeros(),
            commands: [NozzleCommand::straight(params.min_speed); 4],
            attitude_setpoint: Vector3::zeros(),
        }
    }

    pub fn clamp_flags(&self) -> [ClampFlags; 4] {
        std::array::from_fn(|i| self.commands[i].clamp)
    }
}

#[derive(Debug, Clone)]
pub struct FlightController {
    params: VehicleParams,
    config: ControllerConfig,
    alloc: AllocationMatrix,
    mode: ControlMode,
    locked_map: Option<Matrix4<f64>>,
    shape: Option<LockedAngles>,

    position_pid: Pid3,
    velocity_pid: Pid3,
    attitude_pid: Pid3,
    rate_pid: Pid3,

    velocity_cmd: Vector3<f64>,
    rate_cmd: Vector3<f64>,
    attitude_sp: Vector3<f64>,
    inertial_force: Vector3<f64>,
    prev_velocity_error: Option<Vector3<f64>>,
    prev_rate_error: Option<Vector3<f64>>,

    output: ControlOutput,
    sim_dt: f64,
    outer_every: u64,
    inner_every: u64,
    step_count: u64,
    inner_ticks: u64,
    outer_ticks: u64,
    transitions: Vec<TransitionRecord>,
    pending_jump: Option<(usize, BodyWrench)>,
}

fn divisor(rate_hz: f64, dt: f64) -> u64 {
    ((1.0 / (rate_hz * dt)).round() as u64).max(1)
}

impl FlightController {
    /// Controller advanced once per simulation step of length `sim_dt`.
    pub fn new(params: VehicleParams, config: ControllerConfig, sim_dt: f64) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        if !(sim_dt > 0.0) {
            return Err(Error::Domain("controller step must be > 0".into()));
        }
        let alloc = AllocationMatrix::build(&params)?;
        let hover = params.hover_speed();
        let mut output = ControlOutput::idle(&params);
        output.commands = [NozzleCommand::straight(hover); 4];
        output.wrench = BodyWrench::new(Vector3::new(0.0, 0.0, params.weight()), Vector3::zeros());
        Ok(Self {
            params,
            config,
            alloc,
            mode: ControlMode::FullyActuated,
            locked_map: None,
            shape: None,
            position_pid: Pid3::default(),
            velocity_pid: Pid3::default(),
            attitude_pid: Pid3::default(),
            rate_pid: Pid3::default(),
            velocity_cmd: Vector3::zeros(),
            rate_cmd: Vector3::zeros(),
            attitude_sp: Vector3::zeros(),
            inertial_force: Vector3::new(0.0, 0.0, -params.weight()),
            prev_velocity_error: None,
            prev_rate_error: None,
            output,
            sim_dt,
            outer_every: divisor(config.outer_rate_hz, sim_dt),
            inner_every: divisor(config.inner_rate_hz, sim_dt),
            step_count: 0,
            inner_ticks: 0,
            outer_ticks: 0,
            transitions: Vec::new(),
            pending_jump: None,
        })
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }
    pub fn allocation(&self) -> &AllocationMatrix {
        &self.alloc
    }
    pub fn mode(&self) -> &ControlMode {
        &self.mode
    }
    pub fn output(&self) -> &ControlOutput {
        &self.output
    }
    pub fn inner_ticks(&self) -> u64 {
        self.inner_ticks
    }
    pub fn outer_ticks(&self) -> u64 {
        self.outer_ticks
    }
    pub fn transitions(&self) -> &[TransitionRecord] {
        &self.transitions
    }
    pub fn shape(&self) -> Option<&LockedAngles> {
        self.shape.as_ref()
    }

    fn gains(&self) -> &GainSet {
        match self.mode {
            ControlMode::FullyActuated => &self.config.fully_actuated,
            ControlMode::GraspPerch { .. } => &self.config.grasp_perch,
        }
    }

    /// Preferred nozzle shape realized through the allocation null space in
    /// fully-actuated mode; `None` returns to the minimal-norm solution.
    pub fn set_shape(&mut self, shape: Option<LockedAngles>) -> Result<()> {
        if let Some(s) = &shape {
            s.validate(&self.params)?;
        }
        self.shape = shape;
        Ok(())
    }

    /// Clear loop memory and hold the given state (used after a kinematic
    /// attachment is released).
    pub fn reset(&mut self, state: &VehicleState) {
        self.position_pid.reset();
        self.velocity_pid.reset();
        self.attitude_pid.reset();
        self.rate_pid.reset();
        self.velocity_cmd = state.velocity;
        self.rate_cmd = Vector3::zeros();
        self.attitude_sp = state.attitude;
        self.inertial_force = Vector3::new(0.0, 0.0, -self.params.weight());
        self.prev_velocity_error = None;
        self.prev_rate_error = None;
    }

    /// Switch modes at time `t`, with bumpless integrator transfer.
    pub fn request_mode(&mut self, requested: ModeKind, t: f64) -> Result<TransitionRecord> {
        self.request_mode_with(requested, None, t)
    }

    /// As [`Self::request_mode`], locking `lock` instead of the current
    /// commanded angles when entering grasp/perch.
    pub fn request_mode_with(
        &mut self,
        requested: ModeKind,
        lock: Option<&LockedAngles>,
        t: f64,
    ) -> Result<TransitionRecord> {
        let from = self.mode.kind();
        let commands = match lock {
            Some(l) => std::array::from_fn(|i| NozzleCommand::new(l.bend(i), l.azimuth(i), self.output.commands[i].speed)),
            None => self.output.commands,
        };
        let next = mode_switch(&self.mode, requested, &commands, &self.params)?;
        let old_gains = *self.gains();
        let prev_mode = self.mode;
        self.mode = next;
        let new_gains = *self.gains();
        if from != next.kind() {
            self.position_pid.transfer(&old_gains.position, &new_gains.position);
            self.velocity_pid.transfer(&old_gains.velocity, &new_gains.velocity);
            self.attitude_pid.transfer(&old_gains.attitude, &new_gains.attitude);
            self.rate_pid.transfer(&old_gains.rate, &new_gains.rate);
        }
        match (&prev_mode, &self.mode) {
            (ControlMode::FullyActuated, ControlMode::GraspPerch { locked }) => {
                self.locked_map = Some(underactuated::effectiveness(locked, &self.params));
            }
            (ControlMode::GraspPerch { locked }, ControlMode::FullyActuated) => {
                self.locked_map = None;
                self.shape = Some(*locked);
            }
            _ => {}
        }
        let record = TransitionRecord {
            time: t,
            from,
            to: self.mode.kind(),
            force_z_jump: None,
            wrench_jump: None,
        };
        if from != record.to {
            self.transitions.push(record);
            self.pending_jump = Some((self.transitions.len() - 1, self.output.wrench));
        }
        Ok(record)
    }

    /// Advance one simulation step.
    pub fn update(&mut self, state: &VehicleState, sp: &Setpoint6D) -> Result<&ControlOutput> {
        if self.step_count.is_multiple_of(self.outer_every) {
            self.outer(state, sp, self.outer_every as f64 * self.sim_dt);
            self.outer_ticks += 1;
        }
        if self.step_count.is_multiple_of(self.inner_every) {
            self.inner(state, self.inner_every as f64 * self.sim_dt)?;
            self.inner_ticks += 1;
            if let Some((idx, before)) = self.pending_jump.take() {
                let after = self.output.wrench;
                self.transitions[idx].force_z_jump = Some(after.force.z - before.force.z);
                self.transitions[idx].wrench_jump =
                    Some((after.to_vector() - before.to_vector()).norm());
            }
        }
        self.step_count += 1;
        Ok(&self.output)
    }

    fn outer(&mut self, state: &VehicleState, sp: &Setpoint6D, dt: f64) {
        let gains = *self.gains();
        let e_pos = sp.position - state.position;
        let e_vel = sp.velocity - state.velocity;
        let u = self
            .position_pid
            .step(&gains.position, e_pos.into(), e_vel.into(), dt);
        self.velocity_cmd = sp.velocity + Vector3::from(u);

        self.attitude_sp = match self.mode {
            ControlMode::FullyActuated => sp.attitude,
            ControlMode::GraspPerch { .. } => self.tilt_setpoint(sp.attitude.z),
        };
        let e_att = Vector3::new(
            self.attitude_sp.x - state.attitude.x,
            self.attitude_sp.y - state.attitude.y,
            frame::wrap_pi(self.attitude_sp.z - state.attitude.z),
        );
        let u = self
            .attitude_pid
            .step(&gains.attitude, e_att.into(), (-state.rates).into(), dt);
        self.rate_cmd = Vector3::from(u);
    }

    /// Roll/pitch that align the fixed thrust axis with the inertial force demand.
    fn tilt_setpoint(&self, yaw: f64) -> Vector3<f64> {
        let f = self.inertial_force;
        if f.norm() < 1e-9 * self.params.weight() {
            return Vector3::new(0.0, 0.0, yaw);
        }
        let b = frame::reference_to_inertial().transpose() * f / f.norm();
        let (s, c) = yaw.sin_cos();
        let bx = c * b.x + s * b.y;
        let by = -s * b.x + c * b.y;
        let roll = (-by).clamp(-1.0, 1.0).asin();
        let pitch = bx.atan2(b.z);
        Vector3::new(
            roll.clamp(-self.params.max_roll(), self.params.max_roll()),
            pitch.clamp(-self.params.max_pitch(), self.params.max_pitch()),
            yaw,
        )
    }

    fn inner(&mut self, state: &VehicleState, dt: f64) -> Result<()> {
        let gains = *self.gains();
        let p = self.params;
        let e_vel = self.velocity_cmd - state.velocity;
        let de_vel = self
            .prev_velocity_error
            .map_or(Vector3::zeros(), |prev| (e_vel - prev) / dt);
        self.prev_velocity_error = Some(e_vel);
        let acc = Vector3::from(self.velocity_pid.step(&gains.velocity, e_vel.into(), de_vel.into(), dt));
        self.inertial_force = p.mass * acc - Vector3::new(0.0, 0.0, p.weight());
        let (phi, theta, psi) = (state.attitude.x, state.attitude.y, state.attitude.z);
        let body_force = frame::body_to_inertial(phi, theta, psi).transpose() * self.inertial_force;

        let e_rate = self.rate_cmd - state.rates;
        let de_rate = self
            .prev_rate_error
            .map_or(Vector3::zeros(), |prev| (e_rate - prev) / dt);
        self.prev_rate_error = Some(e_rate);
        let moment = Vector3::from(self.rate_pid.step(&gains.rate, e_rate.into(), de_rate.into(), dt));

        let prev = self.output.commands;
        self.output = match self.mode {
            ControlMode::FullyActuated => {
                let w = BodyWrench::new(body_force, moment);
                let forces = match &self.shape {
                    Some(shape) => self.alloc.allocate_shaped(&w, &shape_forces(shape, body_force.z)),
                    None => self.alloc.allocate(&w),
                };
                let split = allocation::split_forces(&forces);
                let commands = std::array::from_fn(|i| match mixer::soft_mixer(&split[i], &p, prev[i].azimuth) {
                    Ok(c) => c,
                    Err(_) => NozzleCommand {
                        clamp: ClampFlags::INFEASIBLE | ClampFlags::SPEED_LOW,
                        ..NozzleCommand::new(0.0, prev[i].azimuth, p.min_speed)
                    },
                });
                ControlOutput {
                    wrench: w,
                    forces,
                    commands,
                    attitude_setpoint: self.attitude_sp,
                }
            }
            ControlMode::GraspPerch { locked } => {
                let e = self
                    .locked_map
                    .get_or_insert_with(|| underactuated::effectiveness(&locked, &p));
                let sol = underactuated::underactuated_mixer_saturating(body_force.z, &moment, e, &p)?;
                let dirs = locked.directions();
                let mut forces = NozzleForces::zeros();
                for i in 0..NOZZLE_COUNT {
                    let f = sol.thrusts[i].max(0.0) * dirs[i];
                    forces.fixed_rows_mut::<3>(3 * i).copy_from(&f);
                }
                let commands = std::array::from_fn(|i| NozzleCommand {
                    clamp: sol.clamp[i],
                    ..NozzleCommand::new(locked.bend(i), locked.azimuth(i), sol.speeds[i])
                });
                ControlOutput {
                    wrench: BodyWrench::new(Vector3::new(0.0, 0.0, body_force.z), moment),
                    forces,
                    commands,
                    attitude_setpoint: self.attitude_sp,
                }
            }
        };
        Ok(())
    }
}

/// Per-nozzle force pattern along the shape's directions carrying `force_z`.
fn shape_forces(shape: &LockedAngles, force_z: f64) -> NozzleForces {
    let dirs = shape.directions();
    let axial: f64 = dirs.iter().map(|d| d.z).sum();
    let t = if axial > 0.0 { force_z / axial } else { 0.0 };
    allocation::join_forces(&std::array::from_fn(|i| {
        t * thrust_direction(shape.bend(i), shape.azimuth(i))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn controller() -> FlightController {
        FlightController::new(VehicleParams::default(), ControllerConfig::default(), 1e-3).unwrap()
    }

    #[test]
    fn equilibrium_outputs_hover_feedforward() {
        let mut c = controller();
        let p = VehicleParams::default();
        let state = VehicleState::at_rest(Vector3::new(1.0, 2.0, -1.0));
        let out = *c.update(&state, &Setpoint6D::hold(state.position)).unwrap();
        assert!((out.wrench.force - Vector3::new(0.0, 0.0, p.weight())).amax() < 1e-12);
        assert_eq!(out.wrench.moment, Vector3::zeros());
        for cmd in out.commands {
            assert_eq!(cmd.bend, 0.0);
            assert!((cmd.speed - p.hover_speed()).abs() < 1e-9);
        }
    }

    #[test]
    fn vertical_error_maps_to_body_z_only() {
        let mut c = controller();
        let state = VehicleState::at_rest(Vector3::new(0.0, 0.0, -1.0));
        let out = *c.update(&state, &Setpoint6D::hold(Vector3::new(0.0, 0.0, -1.2))).unwrap();
        assert_eq!(out.wrench.force.x, 0.0);
        assert_eq!(out.wrench.force.y, 0.0);
        assert!(out.wrench.force.z > VehicleParams::default().weight());
    }

    #[test]
    fn lateral_step_commands_lateral_force_without_moment() {
        let mut c = controller();
        let state = VehicleState::at_rest(Vector3::zeros());
        let out = *c.update(&state, &Setpoint6D::hold(Vector3::new(0.5, 0.0, 0.0))).unwrap();
        // inertial +x is body +y at zero attitude
        assert!(out.wrench.force.y > 0.0);
        assert!(out.wrench.force.x.abs() < 1e-12);
        assert_eq!(out.wrench.moment, Vector3::zeros());
    }

    #[test]
    fn straight_lock_rejected() {
        let mut c = controller();
        let state = VehicleState::default();
        c.update(&state, &Setpoint6D::hold(Vector3::zeros())).unwrap();
        assert!(matches!(
            c.request_mode(ModeKind::GraspPerch, 0.0),
            Err(Error::SwitchRejected(_))
        ));
        assert_eq!(c.mode().kind(), ModeKind::FullyActuated);
    }

    #[test]
    fn shaped_allocation_bends_nozzles() {
        let mut c = controller();
        c.set_shape(Some(LockedAngles::bilateral(20f64.to_radians()))).unwrap();
        let state = VehicleState::default();
        let out = *c.update(&state, &Setpoint6D::hold(Vector3::zeros())).unwrap();
        for cmd in out.commands {
            assert!((cmd.bend - 20f64.to_radians()).abs() < 1e-9);
        }
        let record = c.request_mode(ModeKind::GraspPerch, 0.0).unwrap();
        assert_eq!(record.to, ModeKind::GraspPerch);
    }

    #[test]
    fn mode_switch_function() {
        let p = VehicleParams::default();
        let straight = [NozzleCommand::straight(1000.0); 4];
        assert!(matches!(
            mode_switch(&ControlMode::FullyActuated, ModeKind::GraspPerch, &straight, &p),
            Err(Error::SwitchRejected(_))
        ));
        let lock = LockedAngles::bilateral(0.3);
        let bent = std::array::from_fn(|i| NozzleCommand::new(lock.bend(i), lock.azimuth(i), 1000.0));
        let m = mode_switch(&ControlMode::FullyActuated, ModeKind::GraspPerch, &bent, &p).unwrap();
        let ControlMode::GraspPerch { locked } = m else {
            panic!()
        };
        for i in 0..4 {
            assert!((locked.bend(i) - lock.bend(i)).abs() < 1e-15);
        }
        assert_eq!(
            mode_switch(&m, ModeKind::FullyActuated, &bent, &p).unwrap(),
            ControlMode::FullyActuated
        );
    }

    #[test]
    fn loop_divisors_follow_rates() {
        let mut c = FlightController::new(VehicleParams::default(), ControllerConfig::default(), 1e-3).unwrap();
        let s = VehicleState::default();
        for _ in 0..1000 {
            c.update(&s, &Setpoint6D::default()).unwrap();
        }
        assert_eq!(c.outer_ticks(), 100);
        assert_eq!(c.inner_ticks(), 500);
    }
}
