//! Fixed-step co-simulation of controller and plant.

use super::log::{LogMode, LogRecord, TrajectoryLog};
use super::metrics::{MetricOptions, Metrics};
use super::reference::{waypoint_setpoint, Waypoint};
use super::scenario::{DisturbanceKind, Reference, Scenario};
use crate::control::{
    grasp_plan, ControlMode, ControllerConfig, FlightController, GraspPlan, LockedAngles, ModeKind,
    NozzleCommand, Setpoint6D,
};
use crate::dynamics::{self, AttitudeKinematics, BodyWrench, MomentModel, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::kinematics::CurvatureConfig;
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub params: VehicleParams,
    pub controller: ControllerConfig,
    pub moment_model: MomentModel,
    pub attitude_kinematics: AttitudeKinematics,
    /// Crash detection threshold on the state vector norm.
    pub divergence_bound: f64,
    /// Largest position error (m) at which a perch attachment is accepted.
    pub attach_tolerance: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            params: VehicleParams::default(),
            controller: ControllerConfig::default(),
            moment_model: MomentModel::Exact,
            attitude_kinematics: AttitudeKinematics::Exact,
            divergence_bound: 1e4,
            attach_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScriptAction {
    Mode(ModeKind),
    /// Enter grasp/perch with these angles locked.
    Lock(LockedAngles),
    Shape(Option<LockedAngles>),
    Attach,
    Detach,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedAction {
    pub time: f64,
    pub action: ScriptAction,
}

/// Setpoint path and timed actions of a grasp/perch scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspScript {
    pub plan: GraspPlan,
    pub waypoints: Vec<Waypoint>,
    pub actions: Vec<TimedAction>,
    /// Body position while perched (m).
    pub perch_position: Vector3<f64>,
    /// Time the script has returned to minimal-norm fully-actuated flight.
    pub end_time: f64,
}

const SETTLE: f64 = 1.0;
const TAKEOFF_TIME: f64 = 3.0;

/// Compose the grasp plan with approach, perch and takeoff.
///
/// Fails with [`Error::Unreachable`] before any motion when the target
/// cannot be reached.
pub fn grasp_perch_script(scenario: &Scenario, params: &VehicleParams) -> Result<GraspScript> {
    let Reference::GraspPerch {
        target_position,
        target,
        options,
        perch_time,
    } = &scenario.reference
    else {
        return Err(Error::Scenario(format!("{} has no grasp/perch reference", scenario.name)));
    };
    let plan = grasp_plan(target, params, options)?;
    let up = Vector3::new(0.0, 0.0, -1.0);
    let perch = Vector3::from(*target_position) + up * target.center_depth;
    let above = perch + up * options.approach_height;

    let t_pre = SETTLE;
    let t_descend = t_pre + options.pre_bend_time;
    let t_down = t_descend + options.approach_time;
    let t_converge = t_down + SETTLE;
    let t_lock = t_converge + options.converge_time;
    let t_attach = t_lock + 0.5;
    let t_detach = t_attach + perch_time;
    let t_up = t_detach + TAKEOFF_TIME;
    let t_unlock = t_up + 0.5;
    let t_release = t_unlock + SETTLE;

    let outward = plan.phases.iter().find_map(|p| match p {
        crate::control::GraspPhase::PreBend { shape, .. } => Some(*shape),
        _ => None,
    });
    let wp = |time: f64, p: Vector3<f64>| Waypoint {
        time,
        position: p.into(),
    };
    let at = |time: f64, action: ScriptAction| TimedAction { time, action };
    let script = GraspScript {
        waypoints: vec![
            wp(0.0, above),
            wp(t_descend, above),
            wp(t_down, perch),
            wp(t_detach, perch),
            wp(t_up, above),
        ],
        actions: vec![
            at(t_pre, ScriptAction::Shape(outward)),
            at(t_converge, ScriptAction::Shape(Some(plan.lock))),
            at(t_lock, ScriptAction::Lock(plan.lock)),
            at(t_attach, ScriptAction::Attach),
            at(t_detach, ScriptAction::Detach),
            at(t_unlock, ScriptAction::Mode(ModeKind::FullyActuated)),
            at(t_release, ScriptAction::Shape(None)),
        ],
        perch_position: perch,
        end_time: t_release,
        plan,
    };
    if scenario.duration < script.end_time {
        return Err(Error::Scenario(format!(
            "{}: duration {} s shorter than the grasp/perch script ({} s)",
            scenario.name, scenario.duration, script.end_time
        )));
    }
    Ok(script)
}

fn scheduled_actions(scenario: &Scenario, script: Option<&GraspScript>) -> Vec<TimedAction> {
    let mut actions: Vec<TimedAction> = scenario
        .mode_schedule
        .iter()
        .map(|e| TimedAction {
            time: e.time,
            action: ScriptAction::Mode(e.mode),
        })
        .chain(scenario.shape_schedule.iter().map(|e| TimedAction {
            time: e.time,
            action: ScriptAction::Shape(e.shape.angles()),
        }))
        .chain(script.into_iter().flat_map(|s| s.actions.iter().cloned()))
        .collect();
    actions.sort_by(|a, b| a.time.total_cmp(&b.time));
    actions
}

struct Disturber {
    rng: ChaCha8Rng,
}

impl Disturber {
    fn wrench(&mut self, scenario: &Scenario, t: f64) -> Result<BodyWrench> {
        let Some(d) = &scenario.disturbance else {
            return Ok(BodyWrench::default());
        };
        let dt = scenario.dt;
        let mut w = match d.kind {
            DisturbanceKind::Constant if t >= d.start && t < d.end => {
                BodyWrench::new(d.force.into(), d.moment.into())
            }
            DisturbanceKind::Impulse if d.start >= t - 0.5 * dt && d.start < t + 0.5 * dt => {
                BodyWrench::new(Vector3::from(d.force) / dt, Vector3::from(d.moment) / dt)
            }
            _ => BodyWrench::default(),
        };
        let mut noise = |std: f64| -> Result<Vector3<f64>> {
            if std == 0.0 {
                return Ok(Vector3::zeros());
            }
            let n = Normal::new(0.0, std).map_err(|e| Error::Scenario(e.to_string()))?;
            Ok(Vector3::from_fn(|_, _| n.sample(&mut self.rng)))
        };
        w.force += noise(d.noise_force_std)?;
        w.moment += noise(d.noise_moment_std)?;
        Ok(w)
    }
}

fn plant_wrench(commands: &[NozzleCommand; 4], opts: &SimOptions, geoms: &[crate::NozzleGeometry; 4]) -> Result<BodyWrench> {
    let s = opts.params.nozzle_length;
    let configs: [CurvatureConfig; 4] = [
        commands[0].config(s)?,
        commands[1].config(s)?,
        commands[2].config(s)?,
        commands[3].config(s)?,
    ];
    let speeds = commands.map(|c| c.speed);
    Ok(dynamics::nozzle_wrench(&configs, &speeds, &opts.params, geoms, opts.moment_model))
}

pub fn metric_options(scenario: &Scenario) -> MetricOptions {
    MetricOptions {
        from: scenario.metrics_from,
        settle_tolerance: scenario.settle_tolerance,
        switch_window: scenario.switch_window,
    }
}

/// Execute one scenario.
pub fn run(scenario: &Scenario, opts: &SimOptions) -> Result<(TrajectoryLog, Metrics)> {
    let params = &opts.params;
    params.validate()?;
    scenario.validate(params)?;
    let script = match scenario.reference {
        Reference::GraspPerch { .. } => Some(grasp_perch_script(scenario, params)?),
        _ => None,
    };
    let setpoint = |t: f64| -> Setpoint6D {
        match &script {
            Some(s) => waypoint_setpoint(t, &s.waypoints, 0.0),
            None => scenario.reference.setpoint(t).unwrap_or_default(),
        }
    };

    let mut state = match &scenario.initial {
        Some(init) => init.state(),
        None => {
            let sp = setpoint(0.0);
            VehicleState {
                position: sp.position,
                velocity: sp.velocity,
                attitude: sp.attitude,
                rates: Vector3::zeros(),
            }
        }
    };
    let geoms = params.nozzle_geometries()?;
    let mut ctrl = FlightController::new(*params, opts.controller, scenario.dt)?;
    ctrl.reset(&state);
    let actions = scheduled_actions(scenario, script.as_ref());
    let mut next_action = 0;
    let mut disturber = Disturber {
        rng: ChaCha8Rng::seed_from_u64(scenario.seed),
    };
    let mut attached = false;

    let n = scenario.steps();
    let dt = scenario.dt;
    let mut log = TrajectoryLog::new(&scenario.name, dt);
    log.records.reserve(n + 1);

    for k in 0..=n {
        let t = k as f64 * dt;
        while next_action < actions.len() && actions[next_action].time <= t + 0.5 * dt {
            let a = &actions[next_action];
            next_action += 1;
            match &a.action {
                ScriptAction::Mode(m) => {
                    ctrl.request_mode(*m, t).map_err(|e| e.at(t))?;
                }
                ScriptAction::Lock(lock) => {
                    ctrl.request_mode_with(ModeKind::GraspPerch, Some(lock), t)
                        .map_err(|e| e.at(t))?;
                }
                ScriptAction::Shape(s) => ctrl.set_shape(*s).map_err(|e| e.at(t))?,
                ScriptAction::Attach => {
                    let perch = script.as_ref().map(|s| s.perch_position).unwrap_or(state.position);
                    let err = (state.position - perch).norm();
                    if ctrl.mode().kind() != ModeKind::GraspPerch || err > opts.attach_tolerance {
                        return Err(Error::Scenario(format!(
                            "perch rejected: mode {:?}, position error {err:.4} m",
                            ctrl.mode().kind()
                        ))
                        .at(t));
                    }
                    state = VehicleState {
                        position: perch,
                        attitude: Vector3::new(0.0, 0.0, state.attitude.z),
                        ..Default::default()
                    };
                    attached = true;
                }
                ScriptAction::Detach => {
                    if attached {
                        attached = false;
                        ctrl.reset(&state);
                    }
                }
            }
        }

        let sp = setpoint(t);
        let (wrench, commands, mode, tick) = if attached {
            let locked = match ctrl.mode() {
                ControlMode::GraspPerch { locked } => *locked,
                ControlMode::FullyActuated => LockedAngles::straight(),
            };
            let cmds = std::array::from_fn(|i| NozzleCommand::new(locked.bend(i), locked.azimuth(i), 0.0));
            (BodyWrench::default(), cmds, LogMode::Perched, None)
        } else if scenario.controller_enabled {
            let before = ctrl.inner_ticks();
            let out = *ctrl.update(&state, &sp).map_err(|e| e.at(t))?;
            let tick = (ctrl.inner_ticks() > before).then_some(before);
            let mode = match ctrl.mode().kind() {
                ModeKind::FullyActuated => LogMode::FullyActuated,
                ModeKind::GraspPerch => LogMode::GraspPerch,
            };
            (out.wrench, out.commands, mode, tick)
        } else {
            (
                BodyWrench::default(),
                [NozzleCommand::straight(0.0); 4],
                LogMode::FullyActuated,
                None,
            )
        };
        log.records.push(LogRecord {
            t,
            state,
            setpoint: sp,
            wrench,
            commands,
            mode,
            ctrl_tick: tick,
        });
        if k == n || attached {
            continue;
        }

        let w = plant_wrench(&commands, opts, &geoms).map_err(|e| e.at(t))? + disturber.wrench(scenario, t)?;
        state = dynamics::step(&state, &w, params, opts.attitude_kinematics, dt).map_err(|e| e.at(t))?;
        let norm = state.to_vector().norm();
        if !state.is_finite() || norm > opts.divergence_bound {
            return Err(Error::Divergence { t: t + dt, norm });
        }
    }
    log.transitions = ctrl.transitions().to_vec();
    let metrics = Metrics::compute(&log.samples(), &metric_options(scenario));
    Ok((log, metrics))
}

/// Run independent scenarios concurrently, one thread each; results keep
/// the input order and are keyed by scenario name.
pub fn run_batch(scenarios: &[Scenario], opts: &SimOptions) -> Vec<(String, Result<(TrajectoryLog, Metrics)>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(move || (s.name.clone(), run(s, opts))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}
