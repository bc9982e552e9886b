//! Daemons and execution driving. A daemon picks a nonempty subset of the
//! enabled processes at each step; the zoo here (synchronous, seeded random
//! subset, single-min, single-random, replay) stands in for universal
//! quantification over unfair schedulers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{
    enabled_processes, guards, step, Configuration, CsHandler, EventRecord, ProtocolError,
    ProtocolParams,
};
use crate::topology::Graph;

#[derive(Debug, Error)]
pub enum SchedulerError {
    #[error("no process is enabled after {steps} steps (deadlock)")]
    Deadlock { steps: usize, execution: Box<Execution> },
    #[error("replay schedule has no enabled process at step {0}")]
    ReplayMismatch(usize),
    #[error("replay schedule exhausted at step {0}")]
    ReplayExhausted(usize),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DaemonKind {
    /// Every enabled process moves.
    Synchronous,
    /// Each enabled process is chosen independently with probability `bias`;
    /// an empty draw falls back to one uniform pick.
    RandomSubset { bias: f64 },
    /// Always the single enabled process with the smallest clock (ties by
    /// lowest index) — an adversarial starver.
    SingleMin,
    /// One enabled process uniformly at random.
    SingleRandom,
    /// A recorded schedule: one set of process indices per step.
    Replay { schedule: Vec<Vec<usize>> },
}

#[derive(Debug, Clone)]
pub struct Daemon {
    kind: DaemonKind,
    rng: ChaCha8Rng,
    step_index: usize,
}

impl Daemon {
    pub fn new(kind: DaemonKind, seed: u64) -> Self {
        Daemon { kind, rng: ChaCha8Rng::seed_from_u64(seed), step_index: 0 }
    }

    pub fn kind(&self) -> &DaemonKind {
        &self.kind
    }

    /// Chooses a nonempty subset of `enabled`.
    pub fn choose(
        &mut self,
        conf: &Configuration,
        enabled: &[usize],
    ) -> Result<Vec<usize>, SchedulerError> {
        assert!(!enabled.is_empty(), "daemon invoked with no enabled process");
        let step = self.step_index;
        self.step_index += 1;
        let chosen = match &self.kind {
            DaemonKind::Synchronous => enabled.to_vec(),
            DaemonKind::RandomSubset { bias } => {
                let mut picked: Vec<usize> = enabled
                    .iter()
                    .copied()
                    .filter(|_| self.rng.gen_bool(*bias))
                    .collect();
                if picked.is_empty() {
                    picked.push(*enabled.choose(&mut self.rng).unwrap());
                }
                picked
            }
            DaemonKind::SingleMin => {
                let p = *enabled
                    .iter()
                    .min_by_key(|&&p| (conf.states[p].r, p))
                    .unwrap();
                vec![p]
            }
            DaemonKind::SingleRandom => vec![*enabled.choose(&mut self.rng).unwrap()],
            DaemonKind::Replay { schedule } => {
                let recorded = schedule
                    .get(step)
                    .ok_or(SchedulerError::ReplayExhausted(step))?;
                let filtered: Vec<usize> = recorded
                    .iter()
                    .copied()
                    .filter(|p| enabled.contains(p))
                    .collect();
                if filtered.is_empty() {
                    return Err(SchedulerError::ReplayMismatch(step));
                }
                filtered
            }
        };
        Ok(chosen)
    }
}

/// One recorded transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub chosen: Vec<usize>,
    pub events: Vec<EventRecord>,
    pub after: Configuration,
}

/// A finite execution: initial configuration plus ordered transitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub initial: Configuration,
    pub steps: Vec<StepRecord>,
    /// Indices of steps that close a round (1-based step counts).
    pub round_ends: Vec<usize>,
}

impl Execution {
    pub fn config_at(&self, t: usize) -> &Configuration {
        if t == 0 {
            &self.initial
        } else {
            &self.steps[t - 1].after
        }
    }

    pub fn final_config(&self) -> &Configuration {
        self.config_at(self.steps.len())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The daemon's choices, in order — enough to replay the execution.
    pub fn schedule(&self) -> Vec<Vec<usize>> {
        self.steps.iter().map(|s| s.chosen.clone()).collect()
    }
}

/// Counts complete rounds of an execution: a round ends once every process
/// enabled at its start has executed or been neutralized (its guard fell
/// false without executing).
pub fn round_ends(g: &Graph, params: &ProtocolParams, execution: &Execution) -> Vec<usize> {
    let mut ends = Vec::new();
    let mut pending: Vec<usize> = enabled_processes(g, params, &execution.initial);
    for (i, rec) in execution.steps.iter().enumerate() {
        pending.retain(|&p| !rec.chosen.contains(&p));
        // Neutralization: re-check the guards that remain open.
        pending.retain(|&p| guards(g, params, &rec.after, p).any());
        if pending.is_empty() {
            ends.push(i + 1);
            pending = enabled_processes(g, params, &rec.after);
        }
    }
    ends
}

pub fn count_rounds(g: &Graph, params: &ProtocolParams, execution: &Execution) -> usize {
    round_ends(g, params, execution).len()
}

/// Drives the protocol until `stop` returns true, `max_steps` transitions
/// have run, or no process is enabled (reported as deadlock — impossible
/// under `delta * K > C_G`).
pub fn run<H: CsHandler>(
    g: &Graph,
    params: &ProtocolParams,
    conf0: Configuration,
    daemon: &mut Daemon,
    handler: &H,
    max_steps: usize,
    stop: impl Fn(&Execution) -> bool,
) -> Result<Execution, SchedulerError> {
    let mut execution = Execution { initial: conf0, steps: Vec::new(), round_ends: Vec::new() };
    while execution.steps.len() < max_steps && !stop(&execution) {
        let conf = execution.final_config().clone();
        let enabled = enabled_processes(g, params, &conf);
        if enabled.is_empty() {
            let steps = execution.steps.len();
            execution.round_ends = round_ends(g, params, &execution);
            return Err(SchedulerError::Deadlock { steps, execution: Box::new(execution) });
        }
        let chosen = daemon.choose(&conf, &enabled)?;
        let (after, events) = step(g, params, &conf, &chosen, handler)?;
        execution.steps.push(StepRecord { chosen, events, after });
    }
    execution.round_ends = round_ends(g, params, &execution);
    Ok(execution)
}

/// Replays a recorded schedule against the engine; used for trace round-trips.
pub fn replay<H: CsHandler>(
    g: &Graph,
    params: &ProtocolParams,
    conf0: Configuration,
    schedule: &[Vec<usize>],
    handler: &H,
) -> Result<Execution, SchedulerError> {
    let mut daemon = Daemon::new(DaemonKind::Replay { schedule: schedule.to_vec() }, 0);
    run(g, params, conf0, &mut daemon, handler, schedule.len(), |_| false)
}
