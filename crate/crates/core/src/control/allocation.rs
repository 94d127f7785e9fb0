//! Wrench-to-nozzle-force allocation through the minimal-norm pseudo-inverse.

use crate::dynamics::{BodyWrench, VehicleParams};
use crate::error::{Error, Result};
use nalgebra::{SMatrix, SVector, Vector3};

pub type Effectiveness = SMatrix<f64, 6, 12>;
pub type PseudoInverse = SMatrix<f64, 12, 6>;
pub type NozzleForces = SVector<f64, 12>;

/// Reciprocal condition of `A A^T` below which allocation is refused.
const MIN_RCOND: f64 = 1e-12;

/// The constant 6x12 effectiveness matrix and its right pseudo-inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationMatrix {
    a: Effectiveness,
    pinv: PseudoInverse,
    null_projector: SMatrix<f64, 12, 12>,
    lever: f64,
    arm: f64,
}

impl AllocationMatrix {
    pub fn build(params: &VehicleParams) -> Result<Self> {
        params.validate()?;
        Self::from_geometry(params.equivalent_lever(), params.planar_arm())
    }

    /// Assemble from the equivalent lever `a` and planar arm `c`.
    pub fn from_geometry(lever: f64, arm: f64) -> Result<Self> {
        let (a, c) = (lever, arm);
        #[rustfmt::skip]
        let m = Effectiveness::from_row_slice(&[
            1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0,
            0.0, -a,  -c,  0.0, -a,  -c,  0.0, -a,   c,  0.0, -a,   c,
            a,   0.0,  c,  a,   0.0, -c,  a,   0.0, -c,  a,   0.0,  c,
            c,   -c,  0.0, c,    c,  0.0, -c,   c,  0.0, -c,  -c,  0.0,
        ]);
        let gram = m * m.transpose();
        let eig = gram.symmetric_eigen().eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        let rcond = if hi > 0.0 { lo / hi } else { 0.0 };
        if !(rcond > MIN_RCOND) {
            return Err(Error::Conditioning { rcond });
        }
        let chol = gram.cholesky().ok_or(Error::Conditioning { rcond })?;
        let pinv = m.transpose() * chol.inverse();
        let residual = (m * pinv - SMatrix::<f64, 6, 6>::identity()).amax();
        if residual > 1e-10 {
            return Err(Error::Conditioning { rcond });
        }
        let null_projector = SMatrix::<f64, 12, 12>::identity() - pinv * m;
        Ok(Self {
            a: m,
            pinv,
            null_projector,
            lever,
            arm,
        })
    }

    pub fn matrix(&self) -> &Effectiveness {
        &self.a
    }
    pub fn pseudo_inverse(&self) -> &PseudoInverse {
        &self.pinv
    }
    pub fn lever(&self) -> f64 {
        self.lever
    }
    pub fn arm(&self) -> f64 {
        self.arm
    }

    /// Numerical rank from the singular values.
    pub fn rank(&self) -> usize {
        let sv = self.a.singular_values();
        let tol = sv.max() * 12.0 * f64::EPSILON;
        sv.iter().filter(|s| **s > tol).count()
    }

    /// 2-norm condition number of `A`.
    pub fn condition_number(&self) -> f64 {
        let sv = self.a.singular_values();
        sv.max() / sv.min()
    }

    /// Minimal-norm per-nozzle forces realizing `wrench`.
    pub fn allocate(&self, wrench: &BodyWrench) -> NozzleForces {
        self.pinv * wrench.to_vector()
    }

    /// Minimal-norm solution plus the null-space part of `preferred`; the
    /// produced wrench is unchanged.
    pub fn allocate_shaped(&self, wrench: &BodyWrench, preferred: &NozzleForces) -> NozzleForces {
        self.allocate(wrench) + self.null_projector * preferred
    }

    pub fn wrench_of(&self, forces: &NozzleForces) -> BodyWrench {
        BodyWrench::from_vector(&(self.a * forces))
    }
}

pub fn split_forces(x: &NozzleForces) -> [Vector3<f64>; 4] {
    std::array::from_fn(|i| Vector3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2]))
}

pub fn join_forces(f: &[Vector3<f64>; 4]) -> NozzleForces {
    NozzleForces::from_fn(|r, _| f[r / 3][r % 3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{aggregate_force, aggregate_moment_linearized};

    #[test]
    fn default_rank_six() {
        let alloc = AllocationMatrix::build(&VehicleParams::default()).unwrap();
        assert_eq!(alloc.rank(), 6);
        let id = alloc.matrix() * alloc.pseudo_inverse();
        assert!((id - SMatrix::<f64, 6, 6>::identity()).amax() < 1e-10);
    }

    #[test]
    fn force_rows_follow_summation_pattern() {
        let alloc = AllocationMatrix::build(&VehicleParams::default()).unwrap();
        let a = alloc.matrix();
        for row in 0..3 {
            for col in 0..12 {
                let expected = if col % 3 == row { 1.0 } else { 0.0 };
                assert_eq!(a[(row, col)], expected);
            }
        }
    }

    #[test]
    fn rows_match_aggregation_functions() {
        let p = VehicleParams::default();
        let alloc = AllocationMatrix::build(&p).unwrap();
        let x = NozzleForces::from_fn(|r, _| ((r * 7 + 3) % 11) as f64 * 0.1 - 0.4);
        let f = split_forces(&x);
        let w = alloc.wrench_of(&x);
        assert!((w.force - aggregate_force(&f)).amax() < 1e-15);
        assert!((w.moment - aggregate_moment_linearized(&f, &p)).amax() < 1e-15);
    }

    #[test]
    fn vertical_demand_splits_evenly() {
        let alloc = AllocationMatrix::build(&VehicleParams::default()).unwrap();
        let w = 11.76;
        let x = alloc.allocate(&BodyWrench::new(Vector3::new(0.0, 0.0, w), Vector3::zeros()));
        for (i, f) in split_forces(&x).iter().enumerate() {
            assert!((f - Vector3::new(0.0, 0.0, w / 4.0)).amax() < 1e-12, "nozzle {i}: {f}");
        }
        assert_eq!(alloc.allocate(&BodyWrench::default()), NozzleForces::zeros());
    }

    #[test]
    fn degenerate_geometry_rejected() {
        assert!(matches!(
            AllocationMatrix::from_geometry(0.06, 0.0),
            Err(Error::Conditioning { .. })
        ));
        assert!(matches!(
            AllocationMatrix::from_geometry(0.0, 0.0),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn shaping_keeps_wrench() {
        let alloc = AllocationMatrix::build(&VehicleParams::default()).unwrap();
        let w = BodyWrench::new(Vector3::new(0.3, -0.2, 12.0), Vector3::new(0.01, -0.02, 0.005));
        let pref = NozzleForces::from_fn(|r, _| (r as f64).sin());
        let x = alloc.allocate_shaped(&w, &pref);
        let back = alloc.wrench_of(&x);
        assert!((back.to_vector() - w.to_vector()).amax() < 1e-12);
    }
}
