//! Cable-driven nozzle kinematics under the constant-curvature arc model.
//!
//! Three spaces are involved: drive space (three cable lengths), configuration
//! space (bend angle, bend-plane azimuth, arc length) and task space (tip
//! frame relative to the nozzle base). Azimuths in [`CurvatureConfig`] are
//! measured in the body-aligned nozzle base frame; the cable frame of nozzle
//! `i` is rotated from it by [`NozzleGeometry::azimuth_offset`].

use crate::error::{Error, Result};
use crate::frame::{self, NOZZLE_COUNT};
use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_3;

/// Below this bend angle (rad) the pose uses its series expansion.
pub const STRAIGHT_THRESHOLD: f64 = 1e-6;

const TWO_PI_3: f64 = 2.0 * FRAC_PI_3;
const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Fixed geometry of one nozzle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NozzleGeometry {
    index: usize,
    cable_offset: f64,
    axial_length: f64,
    max_length: f64,
    max_bend: f64,
    mount: Vector2<f64>,
    azimuth_offset: f64,
}

impl NozzleGeometry {
    /// Geometry of nozzle `index` (1..=4) on an airframe of arm length `arm_length`.
    pub fn new(
        index: usize,
        cable_offset: f64,
        axial_length: f64,
        max_length: f64,
        max_bend: f64,
        arm_length: f64,
    ) -> Result<Self> {
        if !(1..=NOZZLE_COUNT).contains(&index) {
            return Err(Error::Domain(format!("nozzle index {index} not in 1..=4")));
        }
        if !(cable_offset > 0.0) || !(axial_length > 0.0) || !(arm_length >= 0.0) {
            return Err(Error::Domain(
                "cable offset and axial length must be positive".into(),
            ));
        }
        if axial_length > max_length {
            return Err(Error::Domain(format!(
                "axial length {axial_length} exceeds maximum {max_length}"
            )));
        }
        if !(max_bend > 0.0) {
            return Err(Error::Domain("maximum bend must be positive".into()));
        }
        let c = frame::planar_arm(arm_length);
        let (sx, sy) = frame::MOUNT_SIGNS[index - 1];
        Ok(Self {
            index,
            cable_offset,
            axial_length,
            max_length,
            max_bend,
            mount: Vector2::new(sx * c, sy * c),
            azimuth_offset: frame::cable_azimuth_offset(index),
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }
    pub fn cable_offset(&self) -> f64 {
        self.cable_offset
    }
    pub fn axial_length(&self) -> f64 {
        self.axial_length
    }
    pub fn max_length(&self) -> f64 {
        self.max_length
    }
    pub fn max_bend(&self) -> f64 {
        self.max_bend
    }
    /// Body-frame (x, y) of the nozzle base.
    pub fn mount(&self) -> Vector2<f64> {
        self.mount
    }
    pub fn azimuth_offset(&self) -> f64 {
        self.azimuth_offset
    }
}

/// Arc parameters of one nozzle: bend angle, bend-plane azimuth, arc length.
///
/// Curvature and radius are derived on demand so the straight configuration
/// stays a regular point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConfig {
    bend: f64,
    azimuth: f64,
    length: f64,
}

impl CurvatureConfig {
    pub fn new(bend: f64, azimuth: f64, length: f64) -> Result<Self> {
        if !bend.is_finite() || bend < 0.0 {
            return Err(Error::Domain(format!("bend angle {bend} must be >= 0")));
        }
        if !azimuth.is_finite() {
            return Err(Error::Domain("azimuth must be finite".into()));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!("arc length {length} must be > 0")));
        }
        Ok(Self {
            bend,
            azimuth: frame::wrap_two_pi(azimuth),
            length,
        })
    }

    pub fn straight(length: f64) -> Result<Self> {
        Self::new(0.0, 0.0, length)
    }

    pub fn bend(&self) -> f64 {
        self.bend
    }
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn curvature(&self) -> f64 {
        self.bend / self.length
    }
    /// Bend radius, `None` for a straight nozzle.
    pub fn radius(&self) -> Option<f64> {
        (self.bend > 0.0).then(|| self.length / self.bend)
    }

    /// Unit direction of the tip axis in the nozzle base frame.
    pub fn tip_direction(&self) -> Vector3<f64> {
        thrust_direction(self.bend, self.azimuth)
    }
}

/// Three cable lengths of one nozzle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CableLengths {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl CableLengths {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Self {
        Self { m1, m2, m3 }
    }

    pub fn mean(&self) -> f64 {
        (self.m1 + self.m2 + self.m3) / 3.0
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.m1, self.m2, self.m3]
    }

    fn validate(&self, geom: &NozzleGeometry) -> Result<()> {
        for (k, m) in self.as_array().into_iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::Domain(format!("cable {} length {m} must be > 0", k + 1)));
            }
            if m > geom.max_length {
                return Err(Error::Domain(format!(
                    "cable {} length {m} exceeds maximum {}",
                    k + 1,
                    geom.max_length
                )));
            }
        }
        Ok(())
    }
}

/// Tip frame of a nozzle relative to its base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipPose {
    /// Tip-frame axes expressed in the base frame.
    pub rotation: Matrix3<f64>,
    /// Tip-circle centre in the base frame.
    pub translation: Vector3<f64>,
}

impl TipPose {
    /// Tip-plane coordinates `(x_end, y_end)`.
    pub fn tip_xy(&self) -> (f64, f64) {
        (self.translation.x, self.translation.y)
    }
}

/// Drive space to configuration space.
pub fn drive_to_config(cables: &CableLengths, geom: &NozzleGeometry) -> Result<CurvatureConfig> {
    cables.validate(geom)?;
    let CableLengths { m1, m2, m3 } = *cables;
    // m1^2 + m2^2 + m3^2 - m1 m2 - m1 m3 - m2 m3, written in differences.
    let disc = 0.5 * ((m1 - m2).powi(2) + (m1 - m3).powi(2) + (m2 - m3).powi(2));
    let bend = 2.0 * disc.sqrt() / (3.0 * geom.cable_offset);
    if bend > geom.max_bend * (1.0 + 1e-12) {
        return Err(Error::Realizability {
            alpha: bend,
            limit: geom.max_bend,
        });
    }
    let length = cables.mean();
    if disc == 0.0 {
        return CurvatureConfig::new(0.0, 0.0, length);
    }
    let local = (m2 + m3 - 2.0 * m1).atan2(SQRT_3 * (m2 - m3));
    CurvatureConfig::new(bend, local + geom.azimuth_offset, length)
}

/// Configuration space to drive space.
pub fn config_to_drive(config: &CurvatureConfig, geom: &NozzleGeometry) -> Result<CableLengths> {
    if config.bend > geom.max_bend * (1.0 + 1e-12) {
        return Err(Error::Realizability {
            alpha: config.bend,
            limit: geom.max_bend,
        });
    }
    let local = config.azimuth - geom.azimuth_offset;
    // alpha * r == L, so the straight limit needs no special case.
    let arc = config.length;
    let spread = config.bend * geom.cable_offset;
    let cables = CableLengths::new(
        arc - spread * local.sin(),
        arc - spread * (local - TWO_PI_3).sin(),
        arc - spread * (local + TWO_PI_3).sin(),
    );
    for (k, m) in cables.as_array().into_iter().enumerate() {
        if !(m > 0.0) || m > geom.max_length {
            return Err(Error::Domain(format!(
                "cable {} length {m} outside (0, {}]",
                k + 1,
                geom.max_length
            )));
        }
    }
    Ok(cables)
}

/// Rotation from the tip frame to the base frame: `Rz(beta) Ry(alpha) Rz(-beta)`.
pub fn tip_rotation(bend: f64, azimuth: f64) -> Matrix3<f64> {
    let (sa, ca) = bend.sin_cos();
    let (sb, cb) = azimuth.sin_cos();
    let vers = ca - 1.0;
    Matrix3::new(
        cb * cb * ca + sb * sb,
        cb * sb * vers,
        cb * sa,
        cb * sb * vers,
        sb * sb * ca + cb * cb,
        sb * sa,
        -cb * sa,
        -sb * sa,
        ca,
    )
}

/// Configuration space to task space.
pub fn config_to_pose(config: &CurvatureConfig) -> TipPose {
    let alpha = config.bend;
    let (sb, cb) = config.azimuth.sin_cos();
    let len = config.length;
    // radial = r (1 - cos a), axial = r sin a, with r = L / a
    let (radial, axial) = if alpha < STRAIGHT_THRESHOLD {
        let a2 = alpha * alpha;
        (len * alpha * (0.5 - a2 / 24.0), len * (1.0 - a2 / 6.0))
    } else {
        let half = 0.5 * alpha;
        (
            len * 2.0 * half.sin().powi(2) / alpha,
            len * alpha.sin() / alpha,
        )
    };
    TipPose {
        rotation: tip_rotation(alpha, config.azimuth),
        translation: Vector3::new(radial * cb, radial * sb, axial),
    }
}

/// Unit thrust direction for bend `alpha` and azimuth `beta`.
pub fn thrust_direction(bend: f64, azimuth: f64) -> Vector3<f64> {
    let (sa, ca) = bend.sin_cos();
    let (sb, cb) = azimuth.sin_cos();
    Vector3::new(cb * sa, sb * sa, ca)
}

/// Body-frame thrust vector of one nozzle spinning at `speed` rad/s.
pub fn nozzle_thrust(config: &CurvatureConfig, speed: f64, thrust_coeff: f64) -> Vector3<f64> {
    let thrust = thrust_coeff * speed * speed;
    thrust * config.tip_direction()
}

/// Exact thrust application point of a nozzle in the body frame.
pub fn application_point(geom: &NozzleGeometry, config: &CurvatureConfig) -> Vector3<f64> {
    let tip = config_to_pose(config).translation;
    Vector3::new(geom.mount.x + tip.x, geom.mount.y + tip.y, tip.z)
}

/// Moment `d x F` of a nozzle force applied at the exact tip point.
pub fn nozzle_moment_exact(
    force: &Vector3<f64>,
    geom: &NozzleGeometry,
    config: &CurvatureConfig,
) -> Vector3<f64> {
    application_point(geom, config).cross(force)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn geom(i: usize) -> NozzleGeometry {
        NozzleGeometry::new(i, 0.025, 0.12, 0.15, 45f64.to_radians(), 0.10).unwrap()
    }

    #[test]
    fn equal_cables_are_straight() {
        let k = drive_to_config(&CableLengths::new(0.12, 0.12, 0.12), &geom(1)).unwrap();
        assert_eq!(k.bend(), 0.0);
        assert_eq!(k.azimuth(), 0.0);
        assert_eq!(k.length(), 0.12);
        assert!(k.radius().is_none());
    }

    #[test]
    fn single_short_cable_bend_angle() {
        // Independent scalar evaluation of the discriminant.
        let (m1, m2, m3) = (0.11f64, 0.12f64, 0.12f64);
        let disc = m1 * m1 + m2 * m2 + m3 * m3 - m1 * m2 - m1 * m3 - m2 * m3;
        assert!((disc - 1e-4).abs() < 1e-15);
        let expected = 2.0 * disc.sqrt() / (3.0 * 0.025);
        let k = drive_to_config(&CableLengths::new(m1, m2, m3), &geom(1)).unwrap();
        assert!((k.bend() - expected).abs() < 1e-12);
        assert!((k.bend() - 0.2667).abs() < 1e-4);
    }

    #[test]
    fn straight_config_gives_equal_cables() {
        let c = config_to_drive(&CurvatureConfig::straight(0.12).unwrap(), &geom(2)).unwrap();
        assert_eq!(c, CableLengths::new(0.12, 0.12, 0.12));
    }

    #[test]
    fn zero_local_azimuth_symmetry() {
        let g = geom(1);
        // bending toward local azimuth 90 deg shortens cable 1 only
        let k = CurvatureConfig::new(0.4, 0.5 * std::f64::consts::PI, 0.12).unwrap();
        let c = config_to_drive(&k, &g).unwrap();
        assert!((c.m1 - (0.12 - 0.4 * g.cable_offset())).abs() < 1e-15);
        assert!((c.m2 - c.m3).abs() < 1e-15);
        assert!((c.m2 - (0.12 + 0.2 * g.cable_offset())).abs() < 1e-15);
    }

    #[test]
    fn thirty_degree_roundtrip() {
        for i in 1..=4 {
            let g = geom(i);
            let k = CurvatureConfig::new(30f64.to_radians(), 0.0, 0.12).unwrap();
            let back = drive_to_config(&config_to_drive(&k, &g).unwrap(), &g).unwrap();
            assert!((back.bend() - k.bend()).abs() < 1e-9);
            assert!(frame::wrap_pi(back.azimuth() - k.azimuth()).abs() < 1e-9);
            assert!((back.length() - 0.12).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_cables_rejected() {
        let g = geom(1);
        assert!(matches!(
            drive_to_config(&CableLengths::new(0.0, 0.12, 0.12), &g),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            drive_to_config(&CableLengths::new(0.16, 0.12, 0.12), &g),
            Err(Error::Domain(_))
        ));
        // 2 cm differences: alpha = 2*0.02/(3*0.025) ~ 30.6 deg, still fine
        assert!(drive_to_config(&CableLengths::new(0.10, 0.12, 0.12), &g).is_ok());
        assert!(matches!(
            drive_to_config(&CableLengths::new(0.08, 0.12, 0.12), &g),
            Err(Error::Realizability { .. })
        ));
    }

    #[test]
    fn straight_pose() {
        for beta in [0.0, 1.0, 4.0] {
            let p = config_to_pose(&CurvatureConfig::new(0.0, beta, 0.12).unwrap());
            assert_eq!(p.rotation, Matrix3::identity());
            assert_eq!(p.translation, Vector3::new(0.0, 0.0, 0.12));
        }
    }

    #[test]
    fn quarter_turn_pose() {
        let len = 0.12;
        let r = len / FRAC_PI_2;
        let p = config_to_pose(&CurvatureConfig::new(FRAC_PI_2, 0.0, len).unwrap());
        assert!((p.translation - Vector3::new(r, 0.0, r)).amax() < 1e-15);
    }

    #[test]
    fn thrust_examples() {
        let t = 2.0e-6 * 1000.0f64.powi(2);
        let f = nozzle_thrust(&CurvatureConfig::straight(0.12).unwrap(), 1000.0, 2.0e-6);
        assert_eq!(f, Vector3::new(0.0, 0.0, t));
        let f = nozzle_thrust(&CurvatureConfig::new(FRAC_PI_2, 0.0, 0.12).unwrap(), 1000.0, 2.0e-6);
        assert!((f - Vector3::new(t, 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn straight_moment_cross_product() {
        let g = geom(1);
        let c = g.mount().x.abs();
        let t = 3.0;
        let m = nozzle_moment_exact(
            &Vector3::new(0.0, 0.0, t),
            &g,
            &CurvatureConfig::straight(0.12).unwrap(),
        );
        assert!((m - Vector3::new(-c * t, c * t, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn four_straight_nozzles_cancel() {
        let k = CurvatureConfig::straight(0.12).unwrap();
        let f = Vector3::new(0.0, 0.0, 2.5);
        let total: Vector3<f64> = (1..=4).map(|i| nozzle_moment_exact(&f, &geom(i), &k)).sum();
        assert!(total.amax() < 1e-15);
    }

    #[test]
    fn negative_bend_rejected() {
        assert!(CurvatureConfig::new(-0.1, 0.0, 0.12).is_err());
        assert!(CurvatureConfig::new(0.1, 0.0, 0.0).is_err());
        let k = CurvatureConfig::new(0.1, -PI / 2.0, 0.1).unwrap();
        assert!((k.azimuth() - 1.5 * PI).abs() < 1e-15);
    }
}
