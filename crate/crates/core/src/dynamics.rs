//! Rigid-body dynamics, wrench aggregation and the RK4 integrator.

use crate::error::{Error, Result};
use crate::frame::{self, EQUIVALENT_LEVER_RATIO, NOZZLE_COUNT};
use crate::kinematics::{self, CurvatureConfig, NozzleGeometry};
use nalgebra::{SVector, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Physical parameters of the vehicle. Angle limits are stored in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// m/s^2
    pub gravity: f64,
    /// kg m^2
    pub inertia_xx: f64,
    pub inertia_yy: f64,
    pub inertia_zz: f64,
    /// Distance from body centre to each nozzle (m).
    pub arm_length: f64,
    /// Nozzle axial length (m).
    pub nozzle_length: f64,
    /// Cable offset from the nozzle axis (m).
    pub cable_offset: f64,
    /// Thrust coefficient, T = c_t w^2 (N s^2).
    pub thrust_coeff: f64,
    pub max_pitch_deg: f64,
    pub max_roll_deg: f64,
    pub max_bend_deg: f64,
    /// Maximum nozzle/cable length (m).
    pub max_length: f64,
    /// rad/s
    pub min_speed: f64,
    pub max_speed: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 1.2,
            gravity: 9.8,
            inertia_xx: 0.00913,
            inertia_yy: 0.00918,
            inertia_zz: 0.01245,
            arm_length: 0.10,
            nozzle_length: 0.12,
            cable_offset: 0.025,
            thrust_coeff: 1.0e-6,
            max_pitch_deg: 30.0,
            max_roll_deg: 30.0,
            max_bend_deg: 45.0,
            max_length: 0.15,
            min_speed: 0.0,
            max_speed: 3000.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("gravity", self.gravity),
            ("inertia_xx", self.inertia_xx),
            ("inertia_yy", self.inertia_yy),
            ("inertia_zz", self.inertia_zz),
            ("arm_length", self.arm_length),
            ("nozzle_length", self.nozzle_length),
            ("cable_offset", self.cable_offset),
            ("thrust_coeff", self.thrust_coeff),
            ("max_pitch_deg", self.max_pitch_deg),
            ("max_roll_deg", self.max_roll_deg),
            ("max_bend_deg", self.max_bend_deg),
            ("max_length", self.max_length),
            ("max_speed", self.max_speed),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("vehicle.{name} must be > 0 (got {v})")));
            }
        }
        if self.nozzle_length > self.max_length {
            return Err(Error::Domain("nozzle_length exceeds max_length".into()));
        }
        if !(self.min_speed >= 0.0) || self.min_speed >= self.max_speed {
            return Err(Error::Domain("need 0 <= min_speed < max_speed".into()));
        }
        if self.max_pitch_deg >= 90.0 || self.max_roll_deg >= 90.0 || self.max_bend_deg >= 90.0 {
            return Err(Error::Domain("angle limits must be below 90 deg".into()));
        }
        Ok(())
    }

    pub fn max_bend(&self) -> f64 {
        self.max_bend_deg.to_radians()
    }
    pub fn max_pitch(&self) -> f64 {
        self.max_pitch_deg.to_radians()
    }
    pub fn max_roll(&self) -> f64 {
        self.max_roll_deg.to_radians()
    }
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }
    /// Fixed lever of the equivalent thrust action point.
    pub fn equivalent_lever(&self) -> f64 {
        EQUIVALENT_LEVER_RATIO * self.nozzle_length
    }
    pub fn planar_arm(&self) -> f64 {
        frame::planar_arm(self.arm_length)
    }
    /// Rotor speed that makes four straight nozzles carry the weight.
    pub fn hover_speed(&self) -> f64 {
        (self.weight() / (NOZZLE_COUNT as f64 * self.thrust_coeff)).sqrt()
    }

    pub fn nozzle_geometry(&self, index: usize) -> Result<NozzleGeometry> {
        NozzleGeometry::new(
            index,
            self.cable_offset,
            self.nozzle_length,
            self.max_length,
            self.max_bend(),
            self.arm_length,
        )
    }

    pub fn nozzle_geometries(&self) -> Result<[NozzleGeometry; 4]> {
        Ok([
            self.nozzle_geometry(1)?,
            self.nozzle_geometry(2)?,
            self.nozzle_geometry(3)?,
            self.nozzle_geometry(4)?,
        ])
    }
}

/// Vehicle state. Position and velocity are inertial (z down); attitude is
/// ZYX Euler (roll, pitch, yaw); rates are body-frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: Vector3<f64>,
    pub rates: Vector3<f64>,
}

pub type StateVector = SVector<f64, 12>;

impl VehicleState {
    pub fn at_rest(position: Vector3<f64>) -> Self {
        Self {
            position,
            ..Default::default()
        }
    }

    pub fn to_vector(&self) -> StateVector {
        let mut v = StateVector::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.position);
        v.fixed_rows_mut::<3>(3).copy_from(&self.velocity);
        v.fixed_rows_mut::<3>(6).copy_from(&self.attitude);
        v.fixed_rows_mut::<3>(9).copy_from(&self.rates);
        v
    }

    pub fn from_vector(v: &StateVector) -> Self {
        Self {
            position: v.fixed_rows::<3>(0).into_owned(),
            velocity: v.fixed_rows::<3>(3).into_owned(),
            attitude: v.fixed_rows::<3>(6).into_owned(),
            rates: v.fixed_rows::<3>(9).into_owned(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }

    pub fn roll(&self) -> f64 {
        self.attitude.x
    }
    pub fn pitch(&self) -> f64 {
        self.attitude.y
    }
    pub fn yaw(&self) -> f64 {
        self.attitude.z
    }
}

/// Body-frame force and moment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyWrench {
    pub force: Vector3<f64>,
    pub moment: Vector3<f64>,
}

impl BodyWrench {
    pub fn new(force: Vector3<f64>, moment: Vector3<f64>) -> Self {
        Self { force, moment }
    }

    pub fn to_vector(&self) -> SVector<f64, 6> {
        SVector::<f64, 6>::new(
            self.force.x,
            self.force.y,
            self.force.z,
            self.moment.x,
            self.moment.y,
            self.moment.z,
        )
    }

    pub fn from_vector(v: &SVector<f64, 6>) -> Self {
        Self {
            force: Vector3::new(v[0], v[1], v[2]),
            moment: Vector3::new(v[3], v[4], v[5]),
        }
    }
}

impl std::ops::Add for BodyWrench {
    type Output = BodyWrench;
    fn add(self, rhs: BodyWrench) -> BodyWrench {
        BodyWrench::new(self.force + rhs.force, self.moment + rhs.moment)
    }
}

/// How Euler-angle rates are obtained from body rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttitudeKinematics {
    /// Full ZYX Euler kinematic matrix.
    #[default]
    Exact,
    /// Small-angle identification of Euler rates with body rates.
    SmallAngle,
}

/// Sum of the four nozzle forces.
pub fn aggregate_force(forces: &[Vector3<f64>; 4]) -> Vector3<f64> {
    forces.iter().sum()
}

/// Body moment under the equivalent-point model: every nozzle force acts on
/// the nozzle axis at the fixed lever `0.5135 s`.
pub fn aggregate_moment_linearized(forces: &[Vector3<f64>; 4], params: &VehicleParams) -> Vector3<f64> {
    let a = params.equivalent_lever();
    let c = params.planar_arm();
    let [f1, f2, f3, f4] = forces;
    let mx = -a * (f1.y + f2.y + f3.y + f4.y) - c * (f1.z + f2.z - f3.z - f4.z);
    let my = a * (f1.x + f2.x + f3.x + f4.x) + c * (f1.z - f2.z - f3.z + f4.z);
    let mz = c * ((f1.x - f1.y) + (f2.x + f2.y) - (f3.x - f3.y) - (f4.x + f4.y));
    Vector3::new(mx, my, mz)
}

/// Body moment with every force applied at its exact bent-tip point.
pub fn aggregate_moment_exact(
    forces: &[Vector3<f64>; 4],
    configs: &[CurvatureConfig; 4],
    geoms: &[NozzleGeometry; 4],
) -> Vector3<f64> {
    (0..NOZZLE_COUNT)
        .map(|i| kinematics::nozzle_moment_exact(&forces[i], &geoms[i], &configs[i]))
        .sum()
}

/// Where the bent nozzle's line of thrust crosses its own axis, measured
/// from the nozzle base: `s tan(alpha/2) / alpha`.
pub fn equivalent_lever(bend: f64, length: f64) -> Result<f64> {
    if !(bend >= 0.0) {
        return Err(Error::Domain(format!("bend angle {bend} must be >= 0")));
    }
    if bend < 1e-4 {
        // tan(x/2)/x = 1/2 + x^2/24 + x^4/240 + ...
        let b2 = bend * bend;
        return Ok(length * (0.5 + b2 / 24.0 + b2 * b2 / 240.0));
    }
    Ok(length * (0.5 * bend).tan() / bend)
}

/// How the plant evaluates the body moment of the nozzle forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentModel {
    /// Forces applied at the bent tip.
    #[default]
    Exact,
    /// Fixed equivalent action point.
    Linearized,
}

/// Plant wrench for four nozzles in the given configurations and speeds.
pub fn nozzle_wrench(
    configs: &[CurvatureConfig; 4],
    speeds: &[f64; 4],
    params: &VehicleParams,
    geoms: &[NozzleGeometry; 4],
    model: MomentModel,
) -> BodyWrench {
    let forces: [Vector3<f64>; 4] = std::array::from_fn(|i| {
        kinematics::nozzle_thrust(&configs[i], speeds[i], params.thrust_coeff)
    });
    let moment = match model {
        MomentModel::Exact => aggregate_moment_exact(&forces, configs, geoms),
        MomentModel::Linearized => aggregate_moment_linearized(&forces, params),
    };
    BodyWrench::new(aggregate_force(&forces), moment)
}

/// Time derivative of the state under a body wrench.
pub fn derivatives(
    state: &VehicleState,
    wrench: &BodyWrench,
    params: &VehicleParams,
    kinematics: AttitudeKinematics,
) -> Result<StateVector> {
    let (phi, theta, psi) = (state.attitude.x, state.attitude.y, state.attitude.z);
    if !(theta.abs() < FRAC_PI_2) {
        return Err(Error::Singularity { theta });
    }
    let m = params.mass;
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let f = &wrench.force;

    let acc = Vector3::new(
        (ct * sp * f.x + (sp * st * sf + cf * cp) * f.y + (sp * st * cf - sf * cp) * f.z) / m,
        (ct * cp * f.x + (cp * st * sf - cf * sp) * f.y + (cp * st * cf + sf * sp) * f.z) / m,
        (m * params.gravity + st * f.x - sf * ct * f.y - cf * ct * f.z) / m,
    );

    let (p, q, r) = (state.rates.x, state.rates.y, state.rates.z);
    let (ixx, iyy, izz) = (params.inertia_xx, params.inertia_yy, params.inertia_zz);
    let rate_dot = Vector3::new(
        (wrench.moment.x + q * r * (iyy - izz)) / ixx,
        (wrench.moment.y + p * r * (izz - ixx)) / iyy,
        (wrench.moment.z + p * q * (ixx - iyy)) / izz,
    );

    let euler_dot = match kinematics {
        AttitudeKinematics::Exact => {
            let tt = st / ct;
            Vector3::new(
                p + (q * sf + r * cf) * tt,
                q * cf - r * sf,
                (q * sf + r * cf) / ct,
            )
        }
        AttitudeKinematics::SmallAngle => state.rates,
    };

    let mut d = StateVector::zeros();
    d.fixed_rows_mut::<3>(0).copy_from(&state.velocity);
    d.fixed_rows_mut::<3>(3).copy_from(&acc);
    d.fixed_rows_mut::<3>(6).copy_from(&euler_dot);
    d.fixed_rows_mut::<3>(9).copy_from(&rate_dot);
    Ok(d)
}

pub const MAX_STEP: f64 = 0.01;

/// Classical RK4 step with the wrench held constant over `dt`.
pub fn step(
    state: &VehicleState,
    wrench: &BodyWrench,
    params: &VehicleParams,
    kinematics: AttitudeKinematics,
    dt: f64,
) -> Result<VehicleState> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::Domain(format!("step dt {dt} outside (0, {MAX_STEP}]")));
    }
    let x0 = state.to_vector();
    let f = |x: &StateVector| derivatives(&VehicleState::from_vector(x), wrench, params, kinematics);
    let k1 = f(&x0)?;
    let k2 = f(&(x0 + k1 * (0.5 * dt)))?;
    let k3 = f(&(x0 + k2 * (0.5 * dt)))?;
    let k4 = f(&(x0 + k3 * dt))?;
    let x1 = x0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    Ok(VehicleState::from_vector(&x1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn default_params_valid() {
        params().validate().unwrap();
        assert!((params().hover_speed() - 1714.64).abs() < 0.01);
    }

    #[test]
    fn free_fall_acceleration() {
        let d = derivatives(
            &VehicleState::default(),
            &BodyWrench::default(),
            &params(),
            AttitudeKinematics::Exact,
        )
        .unwrap();
        assert_eq!(d[5], 9.8);
        assert_eq!(d.iter().filter(|x| **x != 0.0).count(), 1);
    }

    #[test]
    fn hover_balance_is_exact() {
        let p = params();
        let w = BodyWrench::new(Vector3::new(0.0, 0.0, p.weight()), Vector3::zeros());
        let d = derivatives(&VehicleState::default(), &w, &p, AttitudeKinematics::Exact).unwrap();
        assert_eq!(d, StateVector::zeros());
    }

    #[test]
    fn pure_yaw_moment() {
        let p = params();
        let w = BodyWrench::new(Vector3::new(0.0, 0.0, p.weight()), Vector3::new(0.0, 0.0, 0.02));
        let d = derivatives(&VehicleState::default(), &w, &p, AttitudeKinematics::Exact).unwrap();
        assert_eq!(d[11], 0.02 / p.inertia_zz);
        assert_eq!(d[9], 0.0);
        assert_eq!(d[10], 0.0);
    }

    #[test]
    fn translational_rows_match_rotation() {
        let p = params();
        let s = VehicleState {
            attitude: Vector3::new(0.2, -0.3, 0.7),
            ..Default::default()
        };
        let f = Vector3::new(1.1, -0.4, 9.0);
        let d = derivatives(&s, &BodyWrench::new(f, Vector3::zeros()), &p, AttitudeKinematics::Exact)
            .unwrap();
        let expected =
            frame::body_to_inertial(0.2, -0.3, 0.7) * f / p.mass + Vector3::new(0.0, 0.0, p.gravity);
        assert!((d.fixed_rows::<3>(3) - expected).amax() < 1e-14);
    }

    #[test]
    fn small_angle_attitude_rates() {
        let s = VehicleState {
            attitude: Vector3::new(0.3, 0.4, 0.0),
            rates: Vector3::new(0.1, 0.2, 0.3),
            ..Default::default()
        };
        let d = derivatives(&s, &BodyWrench::default(), &params(), AttitudeKinematics::SmallAngle)
            .unwrap();
        assert_eq!(d.fixed_rows::<3>(6).into_owned(), s.rates);
        let e = derivatives(&s, &BodyWrench::default(), &params(), AttitudeKinematics::Exact).unwrap();
        assert!((e.fixed_rows::<3>(6) - s.rates).amax() > 1e-3);
    }

    #[test]
    fn singular_pitch_rejected() {
        let s = VehicleState {
            attitude: Vector3::new(0.0, FRAC_PI_2, 0.0),
            ..Default::default()
        };
        let r = derivatives(&s, &BodyWrench::default(), &params(), AttitudeKinematics::Exact);
        assert!(matches!(r, Err(Error::Singularity { .. })));
    }

    #[test]
    fn step_rejects_bad_dt() {
        let s = VehicleState::default();
        for dt in [0.0, -1e-3, 0.02] {
            assert!(step(&s, &BodyWrench::default(), &params(), AttitudeKinematics::Exact, dt).is_err());
        }
    }

    #[test]
    fn equivalent_lever_endpoints() {
        let s = 0.12;
        assert!((equivalent_lever(0.0, s).unwrap() - 0.5 * s).abs() < 1e-15);
        let a45 = equivalent_lever(45f64.to_radians(), s).unwrap() / s;
        assert!((a45 - 0.527).abs() < 5e-4);
        assert!(equivalent_lever(-0.1, s).is_err());
        // series and closed form agree at the switch-over
        let a: f64 = 0.99e-4;
        let closed = s * (0.5 * a).tan() / a;
        assert!((equivalent_lever(a, s).unwrap() - closed).abs() < 1e-15);
    }

    #[test]
    fn linearized_moment_examples() {
        let p = params();
        let t = 3.0;
        let straight = [Vector3::new(0.0, 0.0, t); 4];
        assert_eq!(aggregate_moment_linearized(&straight, &p), Vector3::zeros());
        let d = 0.1;
        let f = [
            Vector3::new(0.0, 0.0, t + d),
            Vector3::new(0.0, 0.0, t + d),
            Vector3::new(0.0, 0.0, t - d),
            Vector3::new(0.0, 0.0, t - d),
        ];
        let m = aggregate_moment_linearized(&f, &p);
        assert!((m.x + p.planar_arm() * 4.0 * d).abs() < 1e-15);
        assert_eq!(m.y, 0.0);
        assert_eq!(m.z, 0.0);
    }

    #[test]
    fn aggregate_force_examples() {
        let t = 2.0;
        assert_eq!(
            aggregate_force(&[Vector3::new(0.0, 0.0, t); 4]),
            Vector3::new(0.0, 0.0, 4.0 * t)
        );
        let f = [
            Vector3::new(0.5, 0.0, t),
            Vector3::new(0.0, 0.0, t),
            Vector3::new(-0.5, 0.0, t),
            Vector3::new(0.0, 0.0, t),
        ];
        assert_eq!(aggregate_force(&f).x, 0.0);
    }
}
