//! Simulator for feedback-driven linear-optical quantum reservoir computing.
//!
//! N indistinguishable photons enter a reconfigurable M-mode interferometer
//! built from Mach-Zehnder interferometers (MZIs). Threshold detectors turn
//! the output distribution into pairwise click-coincidence features; those
//! features both feed a ridge readout and, through a fixed random map,
//! reprogram a Galton-style wedge of MZIs for the next time step.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). Concrete aliases for the common
//! double-precision case live at the crate root.

pub mod benchmarks;
pub mod detection;
mod error;
pub mod experiment;
pub mod fock;
pub mod linalg;
pub mod mesh;
pub mod readout;
pub mod reservoir;
mod scalar;
pub mod seeding;

pub use error::{Error, Result};
pub use scalar::Real;

pub use detection::{CoincidenceVector, LossModel, ThresholdPattern};
pub use fock::{FockBasis, FockState, PnrDistribution};
pub use mesh::{MeshLayout, MeshParams, MziParams, MziRole, MziSpec};
pub use readout::{CapacityProfile, ReadoutModel, Standardizer, Windows};
pub use reservoir::{FeedbackMap, Reservoir, ReservoirConfig, RunTrace, ShotMode};

pub type MziParams64 = MziParams<f64>;
pub type MeshParams64 = MeshParams<f64>;
pub type PnrDistribution64 = PnrDistribution<f64>;
pub type CoincidenceVector64 = CoincidenceVector<f64>;
pub type LossModel64 = LossModel<f64>;
pub type FeedbackMap64 = FeedbackMap<f64>;
pub type ReservoirConfig64 = ReservoirConfig<f64>;
pub type Reservoir64 = Reservoir<f64>;
pub type RunTrace64 = RunTrace<f64>;
pub type ReadoutModel64 = ReadoutModel<f64>;
pub type CapacityProfile64 = CapacityProfile<f64>;

pub type Reservoir32 = Reservoir<f32>;
pub type RunTrace32 = RunTrace<f32>;
