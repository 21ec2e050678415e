//! GETF: earliest-time-first list scheduling of precedence-constrained task
//! DAGs on related machines with machine-dependent communication delays.
//!
//! The crate is generic over the numeric type ([`Scalar`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix it to `f64`.

pub mod analysis;
pub mod error;
pub mod generate;
pub mod grouping;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod scalar;
pub mod scheduler;

pub use analysis::{BoundReport, Inequality, TerminalChain};
pub use error::{Error, Result};
pub use generate::{generate_instance, GeneratorSpec};
pub use oracle::{brute_force_schedule, lower_bounds, Objective, OracleLimits};
pub use scalar::Scalar;
pub use scheduler::{TieBreakRule, ViolationKind};

pub type Instance = model::Instance<f64>;
pub type TaskGraph = model::TaskGraph<f64>;
pub type Platform = model::Platform<f64>;
pub type CommSpeed = model::CommSpeed<f64>;
pub type Schedule = scheduler::Schedule<f64>;
pub type GroupAssignment = grouping::GroupAssignment<f64>;
pub type MachineGroups = grouping::MachineGroups<f64>;
pub type LinearProgram = lp::LinearProgram<f64>;
pub type PipelineConfig = pipeline::PipelineConfig<f64>;
