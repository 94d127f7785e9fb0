//! Frame and sign conventions shared by every module.
//!
//! Inertial frame: x, y horizontal, z positive down; gravity acts along +z.
//! Body frame: nozzles extend along body +z and each nozzle's straight
//! thrust is also along body +z. At level attitude a positive body `F_z`
//! accelerates the vehicle toward -z (up). Moments are `d x F` with the
//! lever arm `d` measured from the centre of mass.
//!
//! Nozzle `i` (1-based) is mounted at `MOUNT_SIGNS[i-1] * c` with
//! `c = l * sqrt(2)/2`, and its cable frame is rotated by `(i-1) * 90 deg`.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

/// Equivalent thrust action point along the nozzle axis, as a fraction of `s`.
pub const EQUIVALENT_LEVER_RATIO: f64 = 0.5135;

/// Mount sign pattern (x, y) for nozzles 1..4.
pub const MOUNT_SIGNS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

pub const NOZZLE_COUNT: usize = 4;

/// Planar arm `c = (sqrt(2)/2) l` from nozzle to body centre along each axis.
pub fn planar_arm(arm_length: f64) -> f64 {
    FRAC_1_SQRT_2 * arm_length
}

/// Cable-frame rotation of nozzle `index` (1-based).
pub fn cable_azimuth_offset(index: usize) -> f64 {
    (index as f64 - 1.0) * FRAC_PI_2
}

/// Wrap an angle into `[0, 2pi)`.
pub fn wrap_two_pi(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_pi(angle: f64) -> f64 {
    let w = wrap_two_pi(angle + PI) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// ZYX Euler rotation `Rz(psi) Ry(theta) Rx(phi)`.
pub fn euler_zyx(phi: f64, theta: f64, psi: f64) -> Matrix3<f64> {
    let (sf, cf) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(
        ct * cp,
        sf * st * cp - cf * sp,
        cf * st * cp + sf * sp,
        ct * sp,
        sf * st * sp + cf * cp,
        cf * st * sp - sf * cp,
        -st,
        sf * ct,
        cf * ct,
    )
}

/// Axis permutation taking the Euler reference frame to the inertial frame:
/// swaps x and y and flips z.
pub fn reference_to_inertial() -> Matrix3<f64> {
    Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0)
}

/// Rotation mapping body-frame vectors into the inertial frame.
///
/// Its rows are exactly the force-mixing coefficients of the translational
/// equations of motion.
pub fn body_to_inertial(phi: f64, theta: f64, psi: f64) -> Matrix3<f64> {
    reference_to_inertial() * euler_zyx(phi, theta, psi)
}

pub fn unit_z() -> Vector3<f64> {
    Vector3::z()
}
