//! Named verification jobs over the q-series lab.
//!
//! Every job is a [`registry::Check`] strategy stored as a boxed trait object
//! in a [`registry::CheckRegistry`], looked up by its [`report::CheckId`]
//! name. Jobs share expensive artifacts through a [`lab::Lab`] and produce a
//! [`report::VerificationReport`]; [`suite`] runs many of them in parallel
//! and emits human, JSON or TSV reports.

pub mod checks;
pub mod closure;
pub mod coherence;
pub mod lab;
pub mod registry;
pub mod report;
pub mod suite;

pub use lab::{Backend, Lab, LabConfig};
pub use registry::{Check, CheckRegistry, Domain};
pub use report::{CheckId, CheckParams, CheckSpec, FailureDetail, Outcome, Status, VerificationReport};
pub use suite::{run_suite, ReportFormat, SuiteConfig, SuiteReport};
