//! Exact workbench for the continuous CNN problem: the Bishop-Rook online
//! algorithm over ℚ[√3], a potential-function monitor, unit-cost algorithms
//! with a brute-force offline optimum, and instance generators.

pub mod cli;
pub mod engine;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod instance;
pub mod monitor;
pub mod render;
pub mod scalar;
pub mod unit;

pub use engine::{run, BishopRook, EngineState, EventKind, Phase, PhaseKind, Trace, TraceEvent};
pub use error::{Error, Result};
pub use geometry::{l1_distance, Axis, Frame, Point, SignedPerm, Vector};
pub use instance::{
    rectify, refine, validate_alignment, AlignedTrajectory, AlignmentReport, Instance,
    RequestSegment,
};
pub use scalar::Scalar;
