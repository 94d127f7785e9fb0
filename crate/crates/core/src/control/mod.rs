//! Hierarchical flight control: cascaded PID loops, pseudo-inverse
//! allocation, nozzle mixers and the grasp/perch mode.

pub mod allocation;
pub mod controller;
pub mod grasp;
pub mod mixer;
pub mod pid;
pub mod underactuated;

pub use allocation::{AllocationMatrix, NozzleForces};
pub use controller::{
    mode_switch, ControlMode, ControlOutput, ControllerConfig, FlightController, GainSet, ModeKind,
    Setpoint6D, TransitionRecord,
};
pub use grasp::{grasp_plan, GraspOptions, GraspPhase, GraspPlan, GraspTarget, TargetKind};
pub use mixer::{soft_mixer, ClampFlags, NozzleCommand};
pub use pid::{LoopGains, Pid, PidGains};
pub use underactuated::{underactuated_mixer, LockedAngles};
