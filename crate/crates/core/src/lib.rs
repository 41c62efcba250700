//! Value-driven multi-objective job allocation and scheduling.
//!
//! A [`model::Scenario`] describes a plant and an order book. Each order is
//! paid according to a [`valuecurve::ValueCurve`] of its completion time.
//! [`moead`] searches chromosomes ([`encoding`]) that the list scheduler
//! ([`scheduler`]) turns into feasible schedules, trading makespan against
//! total profit.

pub mod encoding;
pub mod harness;
pub mod model;
pub mod moead;
pub mod oracle;
pub mod scheduler;
pub mod valuecurve;

pub use encoding::{Chromosome, Variant};
pub use model::{load_scenario, save_scenario, validate_scenario, Scenario, ValidationReport};
pub use moead::{run, ArchiveEntry, MoeadConfig, ParetoArchive};
pub use scheduler::{build_schedule, evaluate, Instance, ObjectiveVector, Schedule};
pub use valuecurve::{curve_factor, ValueCurve};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
