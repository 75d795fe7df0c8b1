//! Simulation of robot swarms with limited visibility: Max-Line formation
//! (oblivious and luminous), Gathering, and chain formation by
//! go-to-the-middle, with schedulers, traces and analysis checks.

pub mod analysis;
pub mod chain;
pub mod error;
pub mod fixtures;
pub mod gathering;
pub mod geometry;
pub mod line_formation;
pub mod scheduler;
pub mod sim;
pub mod world;

pub use error::{Error, Result};
pub use geometry::{Point2, RangeKind, RangeModel, TAU_GEO};
pub use scheduler::{ActivationRecord, EpochLedger, Scheduler, SchedulerKind, SchedulerSpec};
pub use sim::{simulate, AlgorithmId, InitialSource, Outcome, RunConfig, Trace};
pub use world::{Chirality, GlobalConfiguration, LightState, LocalSnapshot};
