//! Computation tasks and the critical-section handler that folds them into
//! the protocol's normal steps.

use crate::phase_clock::IncSystem;
use crate::protocol::{
    Configuration, CsHandler, ProcessState, ProtocolParams, Registers, Value,
};
use crate::topology::Graph;

use super::ops::{InfimumOp, RSystem};
use super::AggregationError;

/// What a phase of the wave stream computes.
#[derive(Debug, Clone)]
pub enum TaskKind {
    /// Infimum of all inputs; needs phases long enough to cross the network
    /// (`delta >= diameter + 1`).
    GlobalInfimum { op: InfimumOp },
    /// Infimum over the radius-`rho` ball around each process; phases of
    /// exactly `rho + 1` steps via the sliding `v1`/`v2` window.
    BallInfimum { op: InfimumOp, rho: usize },
    /// Infimum over simple walks with per-edge transfer functions; needs
    /// `delta >= longest simple path + 1`.
    ROperator { system: RSystem },
}

impl TaskKind {
    pub fn op(&self) -> &InfimumOp {
        match self {
            TaskKind::GlobalInfimum { op } => op,
            TaskKind::BallInfimum { op, .. } => op,
            TaskKind::ROperator { system } => system.op(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub inputs: Vec<Value>,
}

impl TaskSpec {
    /// Checks the phase length against what the task needs. The r-operator
    /// bound enumerates simple paths, so it refuses graphs larger than
    /// `node_limit`.
    pub fn validate(
        &self,
        g: &Graph,
        params: &ProtocolParams,
        node_limit: usize,
    ) -> Result<(), AggregationError> {
        if self.inputs.len() != g.n() {
            return Err(AggregationError::InputLength {
                expected: g.n(),
                actual: self.inputs.len(),
            });
        }
        let delta = params.delta();
        match &self.kind {
            TaskKind::GlobalInfimum { .. } => {
                let required = g.diameter() as i64 + 1;
                if delta < required {
                    return Err(AggregationError::DeltaTooSmall { required, actual: delta });
                }
            }
            TaskKind::BallInfimum { rho, .. } => {
                let required = *rho as i64 + 1;
                if delta != required {
                    return Err(AggregationError::BallPhaseMismatch {
                        required,
                        actual: delta,
                    });
                }
            }
            TaskKind::ROperator { .. } => {
                let required = g.longest_simple_path_length(node_limit)? as i64 + 1;
                if delta < required {
                    return Err(AggregationError::DeltaTooSmall { required, actual: delta });
                }
            }
        }
        Ok(())
    }

    /// Initial configuration: given clocks, every register preloaded with
    /// the process's input.
    pub fn initial_configuration(&self, clocks: &[i64]) -> Configuration {
        let states = clocks
            .iter()
            .zip(&self.inputs)
            .map(|(&r, &v)| ProcessState { r, v0: v, v1: v, v2: v, res: v })
            .collect();
        Configuration { states }
    }
}

/// `CsHandler` that runs a task. `CS2` opens a phase, `CS1` folds neighbor
/// values; both read only the pre-step configuration.
pub struct TaskHandler<'a> {
    task: &'a TaskSpec,
}

impl<'a> TaskHandler<'a> {
    pub fn new(task: &'a TaskSpec) -> Self {
        TaskHandler { task }
    }

    /// The neighbor register holding `q`'s previous-depth window value: `v2`
    /// if `q` is at `p`'s clock (it has completed one step less within the
    /// phase), `v1` if it already moved ahead.
    fn ball_slot(sys: &IncSystem, p_clock: i64, q: &ProcessState) -> Value {
        if q.r == p_clock {
            q.v2
        } else {
            debug_assert_eq!(sys.phi(p_clock).ok(), Some(q.r));
            q.v1
        }
    }
}

impl CsHandler for TaskHandler<'_> {
    fn cs2(
        &self,
        _g: &Graph,
        _params: &ProtocolParams,
        conf: &Configuration,
        p: usize,
    ) -> Registers {
        let s = &conf.states[p];
        match &self.task.kind {
            // Restart the accumulation from the local input.
            TaskKind::GlobalInfimum { .. } | TaskKind::ROperator { .. } => {
                Registers { v0: s.v0, v1: s.v0, v2: s.v0, res: s.v0 }
            }
            // Reset the window to radius zero; `res` keeps the phase that
            // just finished.
            TaskKind::BallInfimum { .. } => {
                Registers { v0: s.v0, v1: s.v0, v2: s.v0, res: s.v2 }
            }
        }
    }

    fn cs1(
        &self,
        g: &Graph,
        params: &ProtocolParams,
        conf: &Configuration,
        p: usize,
    ) -> Registers {
        let s = &conf.states[p];
        match &self.task.kind {
            TaskKind::GlobalInfimum { op } => {
                let acc = op.fold(
                    std::iter::once(s.v0).chain(g.neighbors(p).iter().map(|&q| conf.states[q].res)),
                );
                Registers { v0: s.v0, v1: s.v1, v2: s.v2, res: acc }
            }
            TaskKind::ROperator { system } => {
                let acc = system.op().fold(std::iter::once(s.v0).chain(
                    g.neighbors(p).iter().map(|&q| system.r(q, p).apply(conf.states[q].res)),
                ));
                Registers { v0: s.v0, v1: s.v1, v2: s.v2, res: acc }
            }
            TaskKind::BallInfimum { op, .. } => {
                let v2 = op.fold(std::iter::once(s.v0).chain(
                    g.neighbors(p)
                        .iter()
                        .map(|&q| Self::ball_slot(params.sys(), s.r, &conf.states[q])),
                ));
                Registers { v0: s.v0, v1: s.v2, v2, res: v2 }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::step;
    use crate::topology::families::{path, ring};

    #[test]
    fn validation_bounds() {
        let g = path(4); // diameter 3, lsp 3
        let p = ProtocolParams::new(&g, None, None, 2, 1).unwrap();
        let global = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
            inputs: vec![0; 4],
        };
        assert!(matches!(
            global.validate(&g, &p, 12),
            Err(AggregationError::DeltaTooSmall { required: 4, actual: 2 })
        ));
        let p4 = ProtocolParams::new(&g, None, None, 4, 1).unwrap();
        global.validate(&g, &p4, 12).unwrap();

        let ball = TaskSpec {
            kind: TaskKind::BallInfimum { op: InfimumOp::Min, rho: 1 },
            inputs: vec![0; 4],
        };
        ball.validate(&g, &p, 12).unwrap();
        assert!(matches!(
            ball.validate(&g, &p4, 12),
            Err(AggregationError::BallPhaseMismatch { required: 2, actual: 4 })
        ));

        let rop = TaskSpec {
            kind: TaskKind::ROperator { system: RSystem::new(InfimumOp::Min) },
            inputs: vec![0; 4],
        };
        assert!(rop.validate(&g, &p, 12).is_err());
        rop.validate(&g, &p4, 12).unwrap();

        let short = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
            inputs: vec![0; 3],
        };
        assert!(matches!(
            short.validate(&g, &p4, 12),
            Err(AggregationError::InputLength { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn global_infimum_accumulates_over_synchronous_phase() {
        // Ring of 3, delta = 2 (diameter 1): CS2 resets, one CS1 reaches the
        // global minimum.
        let g = ring(3);
        let params = ProtocolParams::new(&g, None, None, 2, 1).unwrap();
        let task = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
            inputs: vec![4, 2, 9],
        };
        let handler = TaskHandler::new(&task);
        // Clock 1 -> 2 crosses the phase boundary (1 = delta - 1 mod delta).
        let conf = task.initial_configuration(&[1, 1, 1]);
        let (after_cs2, ev) = step(&g, &params, &conf, &[0, 1, 2], &handler).unwrap();
        assert!(ev.iter().all(|e| e.cs == Some(crate::protocol::CsKind::Cs2)));
        assert_eq!(after_cs2.states[0].res, 4);
        let (after_cs1, ev) = step(&g, &params, &after_cs2, &[0, 1, 2], &handler).unwrap();
        assert!(ev.iter().all(|e| e.cs == Some(crate::protocol::CsKind::Cs1)));
        for s in &after_cs1.states {
            assert_eq!(s.res, 2);
        }
    }

    #[test]
    fn ball_slot_reads_match_neighbor_progress() {
        // Path of 3, rho = 1, delta = 2. Drive processes one at a time and
        // check the window against direct neighborhood minima.
        let g = path(3);
        let params = ProtocolParams::new(&g, None, None, 2, 1).unwrap();
        let task = TaskSpec {
            kind: TaskKind::BallInfimum { op: InfimumOp::Min, rho: 1 },
            inputs: vec![5, 1, 7],
        };
        let handler = TaskHandler::new(&task);
        let mut conf = task.initial_configuration(&[1, 1, 1]);
        // One full phase, processes served middle-first to create skew.
        for chosen in [vec![1], vec![0], vec![2], vec![0, 1, 2]] {
            conf = step(&g, &params, &conf, &chosen, &handler).unwrap().0;
        }
        // After the CS1 at the end of the phase, v2 holds the radius-1
        // minimum at every process.
        assert_eq!(conf.states[0].v2, 1);
        assert_eq!(conf.states[1].v2, 1);
        assert_eq!(conf.states[2].v2, 1);
    }
}
