//! A solver library for the resource-constrained project scheduling problem
//! (RCPSP): activity-list chromosomes evolved by a genetic algorithm and
//! decoded by a serial schedule generation scheme with identified resource
//! units under two allocation policies, EST and WEST.
//!
//! - [`model`]: project networks, validation, critical path
//! - [`sgs`]: the serial decoder, schedules, metrics
//! - [`ga`]: dispatching rules, selection, crossover, mutation, the loop
//! - [`io`]: native JSON and PSPLIB instance formats, CSV artifacts
//! - [`oracle`]: exhaustive search for desk-scale ground truth
//! - [`experiment`]: factorial sweeps, comparison tables, the generator
//!
//! Runs are deterministic: a (instance, config, seed) triple always yields
//! the same result, and all randomness flows from one seeded stream.

pub mod experiment;
pub mod ga;
pub mod io;
pub mod model;
pub mod oracle;
pub mod sgs;

pub use ga::{evolve, ActivityList, CrossoverKind, GaConfig, GaError, GaResult, MutationKind};
pub use model::{critical_path, validate_instance, Activity, Instance, ResourceGroup, Tick};
pub use sgs::{fitness, metrics, serial_sgs, Policy, Schedule, ScheduleMetrics};
