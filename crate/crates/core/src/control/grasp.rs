//! Geometric grasp planning.
//!
//! Targets are described in the body frame along the nozzle extension axis:
//! the target's reference point sits on the body z axis at `center_depth`.
//! The planner picks, per nozzle, a bend toward the target such that the
//! nozzle tip lies on the target surface.

use crate::control::underactuated::LockedAngles;
use crate::dynamics::VehicleParams;
use crate::error::{Error, Result};
use crate::frame::{self, NOZZLE_COUNT};
use crate::kinematics::{self, CurvatureConfig, NozzleGeometry};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// Horizontal cylinder along body x.
    Tube,
    /// Slab of half-thickness `radius` in the body x-z plane.
    Plate,
    /// Cylinder along the body z axis.
    Pole,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspTarget {
    pub kind: TargetKind,
    /// Characteristic radius (m).
    pub radius: f64,
    /// Distance of the target reference point along the nozzle axis (m).
    pub center_depth: f64,
}

impl GraspTarget {
    pub fn new(kind: TargetKind, radius: f64, center_depth: f64) -> Self {
        Self {
            kind,
            radius,
            center_depth,
        }
    }

    /// Distance from a body-frame point to the target's reference set.
    pub fn reference_distance(&self, p: &Vector3<f64>) -> f64 {
        let dz = p.z - self.center_depth;
        match self.kind {
            TargetKind::Tube => p.y.hypot(dz),
            TargetKind::Plate => p.y.abs(),
            TargetKind::Pole => p.x.hypot(p.y),
            TargetKind::Sphere => p.x.hypot(p.y).hypot(dz),
        }
    }

    /// Signed distance to the target surface (positive outside).
    pub fn surface_distance(&self, p: &Vector3<f64>) -> f64 {
        self.reference_distance(p) - self.radius
    }

    /// Body azimuth along which nozzle `i` (0-based) bends toward the target.
    pub fn inward_azimuth(&self, i: usize) -> f64 {
        let (sx, sy) = frame::MOUNT_SIGNS[i];
        match self.kind {
            TargetKind::Tube | TargetKind::Plate => {
                if sy < 0.0 {
                    FRAC_PI_2
                } else {
                    1.5 * PI
                }
            }
            TargetKind::Pole | TargetKind::Sphere => frame::wrap_two_pi((-sy).atan2(-sx)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraspOptions {
    /// Outward pre-bend before approach (deg).
    pub pre_bend_deg: f64,
    /// Height above the perch pose where the approach starts (m).
    pub approach_height: f64,
    pub pre_bend_time: f64,
    pub approach_time: f64,
    pub converge_time: f64,
    /// Allowed tip-to-surface residual (m).
    pub contact_tolerance: f64,
}

impl Default for GraspOptions {
    fn default() -> Self {
        Self {
            pre_bend_deg: 15.0,
            approach_height: 0.5,
            pre_bend_time: 1.5,
            approach_time: 5.0,
            converge_time: 1.5,
            contact_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraspPhase {
    /// Nozzles bent away from the target while hovering above it.
    PreBend { shape: LockedAngles, duration: f64 },
    /// Body moves from `from` to `to`, both given as body position relative
    /// to the target reference point along the nozzle axis (m, positive =
    /// further from the target).
    Approach { from: f64, to: f64, duration: f64 },
    /// Nozzles bend onto the target surface.
    Converge { shape: LockedAngles, duration: f64 },
    /// Lock the converged angles.
    Lock { locked: LockedAngles },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspPlan {
    pub target: GraspTarget,
    pub contact_bends: [f64; 4],
    pub lock: LockedAngles,
    /// Tip-to-surface residuals at the contact bends (m).
    pub residuals: [f64; 4],
    pub phases: Vec<GraspPhase>,
}

impl GraspPlan {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

/// Body-frame tip point of a nozzle bent by `bend` along `azimuth`.
pub fn tip_point(geom: &NozzleGeometry, bend: f64, azimuth: f64) -> Result<Vector3<f64>> {
    let k = CurvatureConfig::new(bend, azimuth, geom.axial_length())?;
    Ok(kinematics::application_point(geom, &k))
}

fn contact_bend(geom: &NozzleGeometry, target: &GraspTarget, azimuth: f64, tol: f64) -> Result<f64> {
    let g = |a: f64| -> Result<f64> { Ok(target.surface_distance(&tip_point(geom, a, azimuth)?)) };
    let g0 = g(0.0)?;
    if g0.abs() <= tol.min(1e-12) {
        return Ok(0.0);
    }
    let max = geom.max_bend();
    const SAMPLES: usize = 450;
    let mut lo = 0.0;
    let mut g_lo = g0;
    for k in 1..=SAMPLES {
        let hi = max * k as f64 / SAMPLES as f64;
        let g_hi = g(hi)?;
        if g_hi == 0.0 {
            return Ok(hi);
        }
        if g_lo.signum() != g_hi.signum() {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = g(mid)?;
                if gm == 0.0 {
                    return Ok(mid);
                }
                if gm.signum() == g_lo.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
        g_lo = g_hi;
    }
    Err(Error::Unreachable(format!(
        "nozzle {}: no bend in [0, {:.1} deg] puts the tip on a {:?} of radius {} m",
        geom.index(),
        max.to_degrees(),
        target.kind,
        target.radius
    )))
}

/// Phased grasp sequence for `target`.
pub fn grasp_plan(target: &GraspTarget, params: &VehicleParams, opts: &GraspOptions) -> Result<GraspPlan> {
    if !(target.radius > 0.0) || !target.radius.is_finite() || !target.center_depth.is_finite() {
        return Err(Error::Domain("target radius must be positive and finite".into()));
    }
    let pre_bend = opts.pre_bend_deg.to_radians();
    if !(0.0..=params.max_bend()).contains(&pre_bend) {
        return Err(Error::Domain("pre-bend outside [0, max_bend]".into()));
    }
    let geoms = params.nozzle_geometries()?;
    let mut bends = [0.0; NOZZLE_COUNT];
    let mut residuals = [0.0; NOZZLE_COUNT];
    let mut lock = [(0.0, 0.0); NOZZLE_COUNT];
    let mut outward = [(0.0, 0.0); NOZZLE_COUNT];
    for i in 0..NOZZLE_COUNT {
        let az = target.inward_azimuth(i);
        let a = contact_bend(&geoms[i], target, az, opts.contact_tolerance)?;
        let r = target.surface_distance(&tip_point(&geoms[i], a, az)?);
        if r.abs() > opts.contact_tolerance {
            return Err(Error::Unreachable(format!(
                "nozzle {} contact residual {r:e} m exceeds tolerance",
                i + 1
            )));
        }
        bends[i] = a;
        residuals[i] = r;
        lock[i] = (a, az);
        outward[i] = (pre_bend, frame::wrap_two_pi(az + PI));
    }
    let lock = LockedAngles(lock);
    let phases = vec![
        GraspPhase::PreBend {
            shape: LockedAngles(outward),
            duration: opts.pre_bend_time,
        },
        GraspPhase::Approach {
            from: target.center_depth + opts.approach_height,
            to: target.center_depth,
            duration: opts.approach_time,
        },
        GraspPhase::Converge {
            shape: lock,
            duration: opts.converge_time,
        },
        GraspPhase::Lock { locked: lock },
    ];
    Ok(GraspPlan {
        target: *target,
        contact_bends: bends,
        lock,
        residuals,
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn straight_contact_is_degenerate() {
        let params = p();
        let geom = params.nozzle_geometry(1).unwrap();
        let depth = params.nozzle_length;
        let probe = GraspTarget::new(TargetKind::Tube, 1.0, depth);
        let r = probe.reference_distance(&tip_point(&geom, 0.0, 0.0).unwrap());
        let plan = grasp_plan(&GraspTarget::new(TargetKind::Tube, r, depth), &params, &Default::default())
            .unwrap();
        assert_eq!(plan.contact_bends, [0.0; 4]);
    }

    #[test]
    fn pipe_contact_on_surface() {
        let target = GraspTarget::new(TargetKind::Tube, 0.05, 0.12);
        let plan = grasp_plan(&target, &p(), &Default::default()).unwrap();
        assert!(plan.max_residual() < 1e-6);
        for b in plan.contact_bends {
            assert!(b > 0.0 && b <= p().max_bend());
        }
        assert_eq!(plan.phases.len(), 4);
    }

    #[test]
    fn oversized_target_unreachable() {
        let target = GraspTarget::new(TargetKind::Tube, 0.5, 0.12);
        assert!(matches!(
            grasp_plan(&target, &p(), &Default::default()),
            Err(Error::Unreachable(_))
        ));
    }

    #[test]
    fn every_kind_plans() {
        for (kind, r) in [
            (TargetKind::Plate, 0.04),
            (TargetKind::Pole, 0.08),
            (TargetKind::Sphere, 0.07),
        ] {
            let plan = grasp_plan(&GraspTarget::new(kind, r, 0.12), &p(), &Default::default()).unwrap();
            assert!(plan.max_residual() < 1e-6, "{kind:?}");
        }
    }

    #[test]
    fn pre_bend_points_outward() {
        let plan = grasp_plan(&GraspTarget::new(TargetKind::Tube, 0.05, 0.12), &p(), &Default::default())
            .unwrap();
        let GraspPhase::PreBend { shape, .. } = &plan.phases[0] else {
            panic!("first phase must be pre-bend");
        };
        for i in 0..4 {
            let d = frame::wrap_pi(shape.azimuth(i) - plan.lock.azimuth(i));
            assert!((d.abs() - PI).abs() < 1e-12);
        }
    }
}
