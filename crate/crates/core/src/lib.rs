//! Exact enumeration engine and multi-agent simulator for learning over
//! finite statement lattices.
//!
//! The crate models finite environments whose aspects are sets of declarative
//! programs, tasks as input/correct-output pairs over a statement universe,
//! policy learning driven by pluggable proxies (weakness, description
//! length), causal-identity construction from intervention records, and
//! multi-organism scenario simulation with deterministic seeded traces.
//!
//! Everything is exact and reproducible: set-valued results are emitted in
//! canonical order, probabilities are exact rationals, and all randomness
//! flows from a single 64-bit seed.

pub mod agents;
pub mod bits;
pub mod causality;
pub mod doc;
pub mod error;
pub mod fixture;
pub mod formalism;
pub mod learning;
pub mod report;
pub mod tasks;

pub use error::{Error, Result};
pub use formalism::{derive_language, Environment, Language, Limits, Program, Statement, Vocabulary};
pub use tasks::{Policy, VTask};
