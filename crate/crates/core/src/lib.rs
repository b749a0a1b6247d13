//! Configuration laboratory for IR-based bug localization.
//!
//! The crate covers the whole pipeline: text preprocessing ([`textprep`]),
//! entity extraction and ground-truth mining ([`extraction`]), numeric
//! kernels ([`numerics`]), the VSM/LSI/LDA/EM classifier families and their
//! configuration space ([`models`]), evaluation metrics ([`evaluation`]),
//! parameter sensitivity analysis ([`sensitivity`]) and the experiment
//! harness behind the `bugloc` binary ([`cli`]).

pub mod cli;
pub mod evaluation;
pub mod extraction;
pub mod models;
pub mod numerics;
pub mod sensitivity;
pub mod textprep;

/// Seconds since the Unix epoch.
pub type Timestamp = i64;
