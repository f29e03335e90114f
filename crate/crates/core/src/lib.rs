//! Simulation, verification and measurement toolkit for deterministic
//! two-party Watson-Crick systems and their reversible variant.
//!
//! The pieces:
//!
//! - [`model`] — machine descriptions, validation, and forward semantics;
//! - [`reverse`] — backward semantics, bounded reversibility certification,
//!   and automatic derivation of backward tables from forward ones;
//! - [`comm`] — message accounting and empirical growth classification;
//! - [`zoo`] — a catalog of concrete machines and reference membership
//!   predicates for the witness languages;
//! - [`combinators`] — reversal and complement constructions;
//! - [`dsl`] — the `.pwk` text format with parser and canonical serializer;
//! - [`oracle`] — brute-force ground truth: bounded enumeration,
//!   machine-vs-predicate equivalence, configuration graphs.

pub mod combinators;
pub mod comm;
pub mod dsl;
pub mod model;
pub mod oracle;
pub mod reverse;
pub mod zoo;

pub use model::{
    AcceptanceMode, Configuration, Machine, MachineSpec, Motion, Msg, SendDefault, Side,
    StepRecord, StepResult, TapeSym, Trace, ValidationReport, Verdict,
};
