//! Simulator and verification library for a self-stabilizing unison
//! protocol on anonymous asynchronous networks.
//!
//! The crate models a finite incrementing clock system, the guarded-command
//! protocol that drives every process's clock, a zoo of daemons for
//! adversarial scheduling, and the causal analysis that turns a stabilized
//! execution into a stream of waves usable for distributed computation
//! (global and ball infima, min-plus shortest paths, and other r-operator
//! folds).
//!
//! Start with [`topology::Graph`] and [`protocol::ProtocolParams`], drive
//! executions with [`scheduler::run`], and analyze them through
//! [`causality::CausalDag`]. The `examples/` directory exercises each
//! capability end to end.

pub mod aggregation;
pub mod causality;
pub mod cli;
pub mod phase_clock;
pub mod protocol;
pub mod scheduler;
pub mod topology;
