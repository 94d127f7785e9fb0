//! Rotor-speed mixer for the locked-nozzle (grasp/perch) mode.
//!
//! With bends and azimuths fixed, thrust magnitudes `T_i` are the only
//! inputs. A 4x4 effectiveness map `E` takes them to `(F_z, M_x, M_y, M_z)`
//! through each nozzle's fixed direction and the equivalent-point moment model.

use crate::control::mixer::ClampFlags;
use crate::dynamics::{aggregate_moment_linearized, VehicleParams};
use crate::error::{Error, Result};
use crate::frame::{self, NOZZLE_COUNT};
use crate::kinematics::thrust_direction;
use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

/// Normalized determinant below which a locked configuration is singular.
pub const SINGULAR_DET: f64 = 1e-9;

/// Locked (bend, azimuth) of the four nozzles, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LockedAngles(pub [(f64, f64); 4]);

impl LockedAngles {
    pub fn straight() -> Self {
        LockedAngles([(0.0, 0.0); 4])
    }

    /// Every nozzle bent by `bend` at the same body azimuth.
    pub fn uniform(bend: f64, azimuth: f64) -> Self {
        LockedAngles([(bend, frame::wrap_two_pi(azimuth)); 4])
    }

    /// Mirror-symmetric clamp about the body x axis: nozzles on the -y side
    /// bend toward +y and vice versa (a pipe grasp along x).
    pub fn bilateral(bend: f64) -> Self {
        LockedAngles(std::array::from_fn(|i| {
            let (_, sy) = frame::MOUNT_SIGNS[i];
            let az = if sy < 0.0 { 0.5 } else { 1.5 } * std::f64::consts::PI;
            (bend, az)
        }))
    }

    /// Every nozzle bent toward the body axis.
    pub fn radial_inward(bend: f64) -> Self {
        LockedAngles(std::array::from_fn(|i| {
            let (sx, sy) = frame::MOUNT_SIGNS[i];
            (bend, frame::wrap_two_pi((-sy).atan2(-sx)))
        }))
    }

    pub fn bend(&self, i: usize) -> f64 {
        self.0[i].0
    }
    pub fn azimuth(&self, i: usize) -> f64 {
        self.0[i].1
    }

    pub fn directions(&self) -> [Vector3<f64>; 4] {
        std::array::from_fn(|i| thrust_direction(self.0[i].0, self.0[i].1))
    }

    pub fn validate(&self, params: &VehicleParams) -> Result<()> {
        for (i, (b, a)) in self.0.iter().enumerate() {
            if !(0.0..=params.max_bend() * (1.0 + 1e-12)).contains(b) || !a.is_finite() {
                return Err(Error::Domain(format!(
                    "locked nozzle {} bend {b} outside [0, max_bend]",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Map from thrust magnitudes to `(F_z, M_x, M_y, M_z)`.
pub fn effectiveness(locked: &LockedAngles, params: &VehicleParams) -> Matrix4<f64> {
    let dirs = locked.directions();
    let mut e = Matrix4::zeros();
    for (i, u) in dirs.iter().enumerate() {
        let mut forces = [Vector3::zeros(); NOZZLE_COUNT];
        forces[i] = *u;
        let m = aggregate_moment_linearized(&forces, params);
        e.set_column(i, &Vector4::new(u.z, m.x, m.y, m.z));
    }
    e
}

/// Determinant divided by the product of column norms, so |det| <= 1.
pub fn normalized_determinant(e: &Matrix4<f64>) -> f64 {
    let scale: f64 = (0..4).map(|c| e.column(c).norm()).product();
    if scale == 0.0 {
        0.0
    } else {
        e.determinant() / scale
    }
}

pub fn check_controllable(locked: &LockedAngles, params: &VehicleParams) -> Result<Matrix4<f64>> {
    let e = effectiveness(locked, params);
    let det = normalized_determinant(&e);
    if det.abs() < SINGULAR_DET {
        return Err(Error::SingularConfig { det });
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnderactuatedSolution {
    /// Thrust magnitudes before speed clamping (N).
    pub thrusts: [f64; 4],
    /// rad/s
    pub speeds: [f64; 4],
    pub clamp: [ClampFlags; 4],
}

fn speeds_from_thrusts(thrusts: &Vector4<f64>, params: &VehicleParams) -> ([f64; 4], [ClampFlags; 4]) {
    let mut clamp = [ClampFlags::empty(); 4];
    let speeds = std::array::from_fn(|i| {
        let w = (thrusts[i].max(0.0) / params.thrust_coeff).sqrt();
        if w < params.min_speed {
            clamp[i].insert(ClampFlags::SPEED_LOW);
            params.min_speed
        } else if w > params.max_speed {
            clamp[i].insert(ClampFlags::SPEED_HIGH);
            params.max_speed
        } else {
            w
        }
    });
    (speeds, clamp)
}

/// Rotor speeds producing `(force_z, moment)` with the nozzles locked.
pub fn underactuated_mixer(
    force_z: f64,
    moment: &Vector3<f64>,
    locked: &LockedAngles,
    params: &VehicleParams,
) -> Result<UnderactuatedSolution> {
    locked.validate(params)?;
    let e = check_controllable(locked, params)?;
    let demand = Vector4::new(force_z, moment.x, moment.y, moment.z);
    let t = e
        .lu()
        .solve(&demand)
        .ok_or(Error::SingularConfig { det: 0.0 })?;
    let scale = t.amax().max(1.0);
    if let Some(i) = (0..4).find(|&i| t[i] < -1e-12 * scale) {
        return Err(Error::Infeasible(format!(
            "nozzle {} needs negative thrust {:.6} N",
            i + 1,
            t[i]
        )));
    }
    let (speeds, clamp) = speeds_from_thrusts(&t, params);
    Ok(UnderactuatedSolution {
        thrusts: [t[0], t[1], t[2], t[3]],
        speeds,
        clamp,
    })
}

/// As [`underactuated_mixer`] but negative thrusts are clipped to zero and
/// flagged instead of rejected.
pub fn underactuated_mixer_saturating(
    force_z: f64,
    moment: &Vector3<f64>,
    e: &Matrix4<f64>,
    params: &VehicleParams,
) -> Result<UnderactuatedSolution> {
    let demand = Vector4::new(force_z, moment.x, moment.y, moment.z);
    let t = e
        .lu()
        .solve(&demand)
        .ok_or(Error::SingularConfig { det: 0.0 })?;
    let (speeds, mut clamp) = speeds_from_thrusts(&t, params);
    for i in 0..4 {
        if t[i] < 0.0 {
            clamp[i].insert(ClampFlags::INFEASIBLE);
        }
    }
    Ok(UnderactuatedSolution {
        thrusts: [t[0], t[1], t[2], t[3]],
        speeds,
        clamp,
    })
}
