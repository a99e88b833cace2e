//! Exact simulation of encapsulated-observer experiments.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: dense states, density matrices, partial traces and projectors
//!   over a registry of labelled subsystems.
//! - [`channels`]: memory-entangling measurement isometries, controlled
//!   preparations, and the Lüders update rule under a [`CollapseModel`].
//! - [`experiment`]: ordered measurement protocols, joint/marginal/conditional
//!   outcome distributions, presets and the JSON config format.
//! - [`storyplot`]: events, plots, stories and compatibility constraints.
//! - [`deduction`]: certainty deductions, deduction chains and contradiction
//!   reports for the Deutsch and Frauchiger/Renner scenarios.
//!
//! Everything is deterministic: distributions are computed by exhaustive
//! enumeration, never by sampling.

#![forbid(unsafe_code)]

pub mod channels;
pub mod deduction;
mod error;
pub mod experiment;
pub mod qstate;
pub mod storyplot;
pub mod tol;

pub use channels::{CollapseModel, MeasurementIsometry, PreparationIsometry};
pub use deduction::{ContradictionReport, DeductionChain, DeductionRule, ScenarioOutcome};
pub use error::{Error, Result};
pub use experiment::{ConditionalTable, ExperimentSpec, JointDistribution, OutcomeAssignment};
pub use qstate::{DensityMatrix, Projector, Registry, StateVector, C64};
pub use storyplot::{CompatibilityConstraint, Entry, Event, EventSchema, Plot, Story};
