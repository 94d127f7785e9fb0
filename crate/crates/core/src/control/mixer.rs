//! Per-nozzle soft mixer: desired force vector to (bend, azimuth, speed).

use crate::dynamics::VehicleParams;
use crate::error::{Error, Result};
use crate::kinematics::{self, CableLengths, CurvatureConfig, NozzleGeometry};
use nalgebra::Vector3;

/// Lateral force (N) below which the bend azimuth is held.
pub const AZIMUTH_HOLD_FORCE: f64 = 1e-9;

/// Saturation events raised while producing a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct ClampFlags(u8);

impl ClampFlags {
    pub const BEND: ClampFlags = ClampFlags(1);
    pub const SPEED_LOW: ClampFlags = ClampFlags(2);
    pub const SPEED_HIGH: ClampFlags = ClampFlags(4);
    pub const INFEASIBLE: ClampFlags = ClampFlags(8);

    pub fn empty() -> Self {
        ClampFlags(0)
    }
    pub fn bits(self) -> u8 {
        self.0
    }
    pub fn from_bits(bits: u8) -> Self {
        ClampFlags(bits & 0x0f)
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn contains(self, other: ClampFlags) -> bool {
        self.0 & other.0 == other.0
    }
    pub fn insert(&mut self, other: ClampFlags) {
        self.0 |= other.0;
    }
}

impl std::ops::BitOr for ClampFlags {
    type Output = ClampFlags;
    fn bitor(self, rhs: ClampFlags) -> ClampFlags {
        ClampFlags(self.0 | rhs.0)
    }
}

/// Actuator-space command of one nozzle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NozzleCommand {
    /// rad
    pub bend: f64,
    /// rad, in [0, 2pi)
    pub azimuth: f64,
    /// rad/s
    pub speed: f64,
    pub clamp: ClampFlags,
}

impl NozzleCommand {
    pub fn new(bend: f64, azimuth: f64, speed: f64) -> Self {
        Self {
            bend,
            azimuth: crate::frame::wrap_two_pi(azimuth),
            speed,
            clamp: ClampFlags::empty(),
        }
    }

    pub fn straight(speed: f64) -> Self {
        Self::new(0.0, 0.0, speed)
    }

    pub fn config(&self, length: f64) -> Result<CurvatureConfig> {
        CurvatureConfig::new(self.bend, self.azimuth, length)
    }

    pub fn force(&self, params: &VehicleParams) -> Vector3<f64> {
        params.thrust_coeff * self.speed * self.speed
            * kinematics::thrust_direction(self.bend, self.azimuth)
    }

    /// Cable lengths that realize this command's bend.
    pub fn cable_lengths(&self, geom: &NozzleGeometry) -> Result<CableLengths> {
        kinematics::config_to_drive(&self.config(geom.axial_length())?, geom)
    }
}

/// Invert the thrust map of one nozzle.
///
/// The azimuth is held at `prev_azimuth` when the lateral force vanishes.
pub fn soft_mixer(force: &Vector3<f64>, params: &VehicleParams, prev_azimuth: f64) -> Result<NozzleCommand> {
    if !force.iter().all(|v| v.is_finite()) {
        return Err(Error::Infeasible("non-finite nozzle force".into()));
    }
    if !(force.z > 0.0) {
        return Err(Error::Infeasible(format!(
            "nozzle axial force {} <= 0 cannot be produced",
            force.z
        )));
    }
    let lateral = force.x.hypot(force.y);
    let mut clamp = ClampFlags::empty();
    let mut bend = lateral.atan2(force.z);
    if bend > params.max_bend() {
        bend = params.max_bend();
        clamp.insert(ClampFlags::BEND);
    }
    let azimuth = if lateral <= AZIMUTH_HOLD_FORCE {
        prev_azimuth
    } else {
        force.y.atan2(force.x)
    };
    let mut speed = (force.norm_squared() / (params.thrust_coeff * params.thrust_coeff)).sqrt().sqrt();
    if speed < params.min_speed {
        speed = params.min_speed;
        clamp.insert(ClampFlags::SPEED_LOW);
    } else if speed > params.max_speed {
        speed = params.max_speed;
        clamp.insert(ClampFlags::SPEED_HIGH);
    }
    Ok(NozzleCommand {
        clamp,
        ..NozzleCommand::new(bend, azimuth, speed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn axial_force() {
        let t = 2.94;
        let c = soft_mixer(&Vector3::new(0.0, 0.0, t), &p(), 1.25).unwrap();
        assert_eq!(c.bend, 0.0);
        assert_eq!(c.azimuth, 1.25);
        assert!((c.speed - (t / p().thrust_coeff).sqrt()).abs() < 1e-9);
        assert!(c.clamp.is_empty());
    }

    #[test]
    fn forty_five_degree_diagonal() {
        let k = 1.3;
        let c = soft_mixer(&Vector3::new(k, k, k * 2f64.sqrt()), &p(), 0.0).unwrap();
        assert!((c.bend - 45f64.to_radians()).abs() < 1e-12);
        assert!((c.azimuth - 45f64.to_radians()).abs() < 1e-12);
        assert!(c.clamp.is_empty());
    }

    #[test]
    fn pulling_is_infeasible() {
        assert!(matches!(
            soft_mixer(&Vector3::new(0.1, 0.0, 0.0), &p(), 0.0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            soft_mixer(&Vector3::new(0.1, 0.0, -1.0), &p(), 0.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn clamps_are_reported() {
        let c = soft_mixer(&Vector3::new(2.0, 0.0, 1.0), &p(), 0.0).unwrap();
        assert!(c.clamp.contains(ClampFlags::BEND));
        assert_eq!(c.bend, p().max_bend());
        let c = soft_mixer(&Vector3::new(0.0, 0.0, 100.0), &p(), 0.0).unwrap();
        assert!(c.clamp.contains(ClampFlags::SPEED_HIGH));
        assert_eq!(c.speed, p().max_speed);
        let params = VehicleParams {
            min_speed: 500.0,
            ..p()
        };
        let c = soft_mixer(&Vector3::new(0.0, 0.0, 0.01), &params, 0.0).unwrap();
        assert!(c.clamp.contains(ClampFlags::SPEED_LOW));
    }

    #[test]
    fn command_reproduces_force() {
        let f = Vector3::new(-0.4, 0.7, 2.5);
        let c = soft_mixer(&f, &p(), 0.0).unwrap();
        assert!((c.force(&p()) - f).amax() < 1e-12);
        let geom = p().nozzle_geometry(3).unwrap();
        let cables = c.cable_lengths(&geom).unwrap();
        let back = kinematics::drive_to_config(&cables, &geom).unwrap();
        assert!((back.bend() - c.bend).abs() < 1e-12);
    }
}
