//! Harness library behind the `hlml` binary: experiment specs and runners,
//! the mass-density demo, and report aggregation.

pub mod experiment;
pub mod massdensity;
pub mod reports;
