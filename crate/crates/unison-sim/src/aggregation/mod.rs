//! Distributed computations carried by the wave stream: idempotent
//! aggregation operators, per-edge transfer functions, the tasks that plug
//! them into the protocol's critical sections, brute-force oracles, and an
//! end-to-end runner that checks phase results off the lifted cuts.

mod ops;
mod oracle;
mod runner;
mod task;

pub use ops::{check_infimum_laws, check_r_function, InfimumOp, LawError, RFunction, RSystem};
pub use oracle::{oracle_ball_infimum, oracle_global_infimum, oracle_r_operator};
pub use runner::{expected_values, run_computation, ComputationRun, PhaseResult};
pub use task::{TaskHandler, TaskKind, TaskSpec};

use thiserror::Error;

use crate::causality::CausalityError;
use crate::scheduler::SchedulerError;
use crate::topology::TopologyError;

#[derive(Debug, Error)]
pub enum AggregationError {
    #[error("phase length {actual} too small: task needs at least {required}")]
    DeltaTooSmall { required: i64, actual: i64 },
    #[error("ball infimum needs phase length exactly {required}, got {actual}")]
    BallPhaseMismatch { required: i64, actual: i64 },
    #[error("expected {expected} inputs, got {actual}")]
    InputLength { expected: usize, actual: usize },
    #[error("protocol did not stabilize within {0} steps")]
    StabilizationTimeout(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Causality(#[from] CausalityError),
}
