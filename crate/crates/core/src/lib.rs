//! Component models and a simulation engine for wind energy conversion
//! systems: correlated stochastic wind field, rotor frames, cp-lambda rotor,
//! two-mass drivetrain, two-axis induction machine and a three-phase line
//! segment, coupled in one state-space model.
//!
//! The component models are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix them to `f64`, which the engine uses throughout.

pub mod aero;
pub mod csvfmt;
pub mod drivetrain;
pub mod engine;
mod error;
pub mod geometry;
pub mod grid;
pub mod machine;
mod scalar;
pub mod table;
pub mod windfield;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec3 = geometry::Vec3<f64>;
pub type Mat3 = geometry::Mat3<f64>;
pub type FrameAngles = geometry::FrameAngles<f64>;
pub type RotorParams = aero::RotorParams<f64>;
pub type InertiaParams = drivetrain::InertiaParams<f64>;
pub type InertiaState = drivetrain::InertiaState<f64>;
pub type GearboxParams = drivetrain::GearboxParams<f64>;
pub type ShaftPortState = drivetrain::ShaftPortState<f64>;
pub type MachineParams = machine::MachineParams<f64>;
pub type MachineState = machine::MachineState<f64>;
pub type MachineInputs = machine::MachineInputs<f64>;
pub type LineSegmentParams = grid::LineSegmentParams<f64>;
pub type LineSegmentState = grid::LineSegmentState<f64>;
pub type PhaseMatrices = grid::PhaseMatrices<f64>;
pub type WindFieldSpec = windfield::WindFieldSpec<f64>;
pub type WindSeries = windfield::WindSeries<f64>;
pub type GridPoint = windfield::GridPoint<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type Vec3 = crate::geometry::Vec3<f32>;
    pub type Mat3 = crate::geometry::Mat3<f32>;
    pub type FrameAngles = crate::geometry::FrameAngles<f32>;
    pub type RotorParams = crate::aero::RotorParams<f32>;
    pub type InertiaParams = crate::drivetrain::InertiaParams<f32>;
    pub type GearboxParams = crate::drivetrain::GearboxParams<f32>;
    pub type MachineParams = crate::machine::MachineParams<f32>;
    pub type LineSegmentParams = crate::grid::LineSegmentParams<f32>;
    pub type WindFieldSpec = crate::windfield::WindFieldSpec<f32>;
    pub type WindSeries = crate::windfield::WindSeries<f32>;
}
