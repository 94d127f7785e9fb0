//! Reference trajectory generators.

use crate::control::Setpoint6D;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Horizontal circle flown at constant altitude and attitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    /// Horizontal centre (m).
    pub center: [f64; 2],
    /// m
    pub radius: f64,
    /// s per revolution
    pub period: f64,
    /// Height above the ground (m); inertial z = -altitude.
    pub altitude: f64,
    /// Held attitude (deg).
    #[serde(default)]
    pub attitude_deg: [f64; 3],
}

impl Default for CircleSpec {
    fn default() -> Self {
        Self {
            center: [2.3, 2.8],
            radius: 1.0,
            period: 12.0,
            altitude: 1.0,
            attitude_deg: [0.0; 3],
        }
    }
}

/// Point on the circle at time `t` with its analytic tangent velocity.
pub fn reference_circle(t: f64, spec: &CircleSpec) -> Setpoint6D {
    let w = TAU / spec.period;
    let (s, c) = (w * t).sin_cos();
    let r = spec.radius;
    Setpoint6D {
        position: Vector3::new(spec.center[0] + r * c, spec.center[1] + r * s, -spec.altitude),
        velocity: Vector3::new(-r * w * s, r * w * c, 0.0),
        attitude: Vector3::from(spec.attitude_deg.map(f64::to_radians)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub time: f64,
    pub position: [f64; 3],
}

/// Smooth point-to-point path through timed waypoints.
///
/// Each segment uses a cubic smoothstep so velocity is zero at every
/// waypoint; the position is held before the first and after the last.
pub fn waypoint_setpoint(t: f64, points: &[Waypoint], yaw: f64) -> Setpoint6D {
    let attitude = Vector3::new(0.0, 0.0, yaw);
    let Some(first) = points.first() else {
        return Setpoint6D {
            attitude,
            ..Default::default()
        };
    };
    if t <= first.time {
        return Setpoint6D {
            position: Vector3::from(first.position),
            velocity: Vector3::zeros(),
            attitude,
        };
    }
    for seg in points.windows(2) {
        let (a, b) = (&seg[0], &seg[1]);
        if t < b.time {
            let span = b.time - a.time;
            let u = ((t - a.time) / span).clamp(0.0, 1.0);
            let s = u * u * (3.0 - 2.0 * u);
            let ds = 6.0 * u * (1.0 - u) / span;
            let pa = Vector3::from(a.position);
            let pb = Vector3::from(b.position);
            return Setpoint6D {
                position: pa + (pb - pa) * s,
                velocity: (pb - pa) * ds,
                attitude,
            };
        }
    }
    Setpoint6D {
        position: Vector3::from(points[points.len() - 1].position),
        velocity: Vector3::zeros(),
        attitude,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_phase_zero() {
        let spec = CircleSpec::default();
        let sp = reference_circle(0.0, &spec);
        assert_eq!(sp.position, Vector3::new(3.3, 2.8, -1.0));
        assert!(sp.velocity.x.abs() < 1e-15 && sp.velocity.y > 0.0);
        assert_eq!(sp.attitude, Vector3::zeros());
    }

    #[test]
    fn circle_half_period_is_antipodal() {
        let spec = CircleSpec::default();
        let sp = reference_circle(spec.period / 2.0, &spec);
        assert!((sp.position - Vector3::new(1.3, 2.8, -1.0)).amax() < 1e-12);
    }

    #[test]
    fn circle_speed_constant() {
        let spec = CircleSpec::default();
        let v = TAU * spec.radius / spec.period;
        for k in 0..50 {
            let sp = reference_circle(k as f64 * 0.37, &spec);
            assert!((sp.velocity.norm() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn waypoint_velocity_is_position_derivative() {
        let pts = [
            Waypoint {
                time: 1.0,
                position: [0.0, 0.0, -1.0],
            },
            Waypoint {
                time: 4.0,
                position: [1.0, -0.5, -2.0],
            },
        ];
        let h = 1e-6;
        for t in [1.5, 2.0, 3.2] {
            let sp = waypoint_setpoint(t, &pts, 0.0);
            let fd = (waypoint_setpoint(t + h, &pts, 0.0).position
                - waypoint_setpoint(t - h, &pts, 0.0).position)
                / (2.0 * h);
            assert!((sp.velocity - fd).amax() < 1e-7);
        }
        assert_eq!(waypoint_setpoint(10.0, &pts, 0.0).position, Vector3::new(1.0, -0.5, -2.0));
    }
}
