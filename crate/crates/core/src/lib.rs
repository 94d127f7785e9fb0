//! Simulation and control of a quadrotor-like UAV whose four thrusters are
//! cable-driven bendable nozzles.
//!
//! - [`kinematics`]: cable lengths, arc parameters and tip pose of one nozzle
//! - [`dynamics`]: rigid-body model, wrench aggregation, RK4 integration
//! - [`control`]: cascaded PID, pseudo-inverse allocation, nozzle mixers,
//!   grasp planning and mode switching
//! - [`sim`]: scenarios, reference trajectories, logs and metrics

// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod error;
pub mod frame;
pub mod kinematics;
pub mod sim;

pub use nalgebra;

pub use control::{
    AllocationMatrix, ControlMode, FlightController, GainSet, LockedAngles, NozzleCommand,
    Setpoint6D,
};
pub use dynamics::{BodyWrench, VehicleParams, VehicleState};
pub use error::{Error, Result};
pub use kinematics::{CableLengths, CurvatureConfig, NozzleGeometry, TipPose};
pub use sim::{Metrics, Scenario, TrajectoryLog};
