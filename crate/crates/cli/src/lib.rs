//! Experiment plans, run records and machine-readable artifacts for the
//! `schreier` binary.

pub mod artifact;
pub mod plan;
