//! Event recording and causal analysis of executions: the causal DAG, past
//! cones and covers, the lifting of bounded clocks to unbounded virtual
//! clocks with their cuts, walk machinery, and the wavelet / wave /
//! strong-wave verifiers.

mod dag;
mod lift;
mod walk;
mod wave;

pub use dag::{CausalDag, Cut, Event, EventId};
pub use lift::{cut_at, lift, segment_events, LiftedClocks};
pub use walk::{
    collapse_runs, is_elementary, is_simple, is_walk, reduce_walk, simple_walks_ending_at,
    walk_cover, Walk,
};
pub use wave::{restricted_cover, verify_strong_wave, verify_wave, verify_wavelet};

use thiserror::Error;

/// Default work cap for the exponential walk/chain enumerations; override
/// per call or via the CLI's `UNISON_EXHAUSTIVE_LIMIT`.
pub const DEFAULT_MAX_WORK: usize = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CausalityError {
    #[error("initial configuration is not in WU0")]
    NotWu0,
    #[error("execution contains a non-normal action at event of process {0}; lifting requires a stabilized run")]
    NotStabilized(usize),
    #[error("cut {0} is incomplete: process {1} never reaches that lifted value")]
    Incomplete(i64, usize),
    #[error("lifted value {k} below the lifting base {base}")]
    BelowBase { k: i64, base: i64 },
    #[error("enumeration truncated after {0} work units; raise the limit for exhaustive verification")]
    Truncated(usize),
    #[error("cuts are not ordered: process {0}")]
    UnorderedCuts(usize),
}
