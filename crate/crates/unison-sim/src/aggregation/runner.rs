//! End-to-end computation driver: stabilize, run the wave stream, lift the
//! execution, and read each phase's results off the cuts.

use crate::causality::{cut_at, lift, CausalDag};
use crate::protocol::{ActionKind, ProtocolParams, Value};
use crate::scheduler::{run, Daemon, Execution};
use crate::topology::Graph;

use super::task::{TaskHandler, TaskSpec};
use super::AggregationError;

/// Results read at the closing cut of one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    /// Phase number `U`: its events carry lifted clocks in
    /// `[U*delta, (U+1)*delta)`.
    pub phase: i64,
    /// `res` register of every process at the cut closing the phase.
    pub values: Vec<Value>,
    /// Normal actions executed within the phase.
    pub na_events: usize,
    /// Neighbor registers read while evaluating guards of those actions.
    pub neighbor_reads: usize,
}

#[derive(Debug)]
pub struct ComputationRun {
    /// The stabilized execution the phases were read from.
    pub execution: Execution,
    pub phases: Vec<PhaseResult>,
}

/// Runs `task` from the given clocks: lets the protocol stabilize, then
/// collects `phases` complete phases of results. The first phase reported is
/// the first one that starts after every process's initial event.
pub fn run_computation(
    g: &Graph,
    params: &ProtocolParams,
    task: &TaskSpec,
    initial_clocks: &[i64],
    daemon: &mut Daemon,
    phases: usize,
    max_steps: usize,
    node_limit: usize,
) -> Result<ComputationRun, AggregationError> {
    task.validate(g, params, node_limit)?;
    let handler = TaskHandler::new(task);
    let delta = params.delta();

    // Stage 1: drive the protocol into the legitimacy set.
    let conf0 = task.initial_configuration(initial_clocks);
    let stabilized = if conf0.is_wu0(g, params) {
        conf0
    } else {
        let exec = run(g, params, conf0, daemon, &handler, max_steps, |e| {
            e.final_config().is_wu0(g, params)
        })?;
        if !exec.final_config().is_wu0(g, params) {
            return Err(AggregationError::StabilizationTimeout(exec.len()));
        }
        exec.final_config().clone()
    };

    // Stage 2: a fresh execution from the legitimate configuration, long
    // enough that every process crosses the requested number of phase
    // boundaries. Initial lifted values are at most the anchor's, so
    // (phases + 2) * delta events per process always suffice.
    let need = ((phases as i64 + 2) * delta) as usize + g.diameter();
    let execution = run(g, params, stabilized, daemon, &handler, max_steps, |e| {
        let mut counts = vec![0usize; g.n()];
        for s in &e.steps {
            for ev in &s.events {
                counts[ev.process] += 1;
            }
        }
        counts.iter().all(|&c| c >= need)
    })?;

    let dag = CausalDag::build(g, &execution);
    let lifted = lift(g, params, &execution, &dag)?;
    let max_init = (0..g.n())
        .map(|p| lifted.value(dag.process_events(p)[0]))
        .max()
        .expect("nonempty graph");
    // First phase whose opening boundary every process actually crosses.
    let first = max_init.div_euclid(delta) + 1;

    let mut results = Vec::with_capacity(phases);
    for phase in first..first + phases as i64 {
        let cut = cut_at(&dag, &lifted, phase * delta + delta - 1)?;
        let values = cut
            .events
            .iter()
            .map(|&e| {
                let ev = dag.event(e);
                execution.config_at(ev.time).states[ev.process].res
            })
            .collect();
        let (mut na_events, mut neighbor_reads) = (0, 0);
        for (id, ev) in dag.events().iter().enumerate() {
            let t = lifted.value(id);
            if !ev.is_initial() && t >= phase * delta && t < (phase + 1) * delta {
                debug_assert_eq!(ev.kind, Some(ActionKind::Normal));
                na_events += 1;
                neighbor_reads += g.degree(ev.process);
            }
        }
        results.push(PhaseResult { phase, values, na_events, neighbor_reads });
    }
    Ok(ComputationRun { execution, phases: results })
}

/// What the distributed computation should produce, straight from the
/// oracles.
pub fn expected_values(
    g: &Graph,
    task: &TaskSpec,
    node_limit: usize,
) -> Result<Vec<Value>, AggregationError> {
    use super::oracle::{oracle_ball_infimum, oracle_global_infimum, oracle_r_operator};
    use super::task::TaskKind;
    Ok(match &task.kind {
        TaskKind::GlobalInfimum { op } => {
            vec![oracle_global_infimum(op, &task.inputs); g.n()]
        }
        TaskKind::BallInfimum { op, rho } => (0..g.n())
            .map(|p| oracle_ball_infimum(g, op, &task.inputs, *rho, p))
            .collect(),
        TaskKind::ROperator { system } => (0..g.n())
            .map(|p| oracle_r_operator(g, system, &task.inputs, p, node_limit))
            .collect::<Result<_, _>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::ops::{InfimumOp, RSystem};
    use crate::aggregation::task::TaskKind;
    use crate::scheduler::DaemonKind;
    use crate::topology::families::{path, ring, star};
    use std::collections::HashMap;

    fn check_task(
        g: &Graph,
        delta: i64,
        rho: i64,
        task: &TaskSpec,
        daemon_kind: DaemonKind,
        seed: u64,
        clocks: &[i64],
    ) {
        let params = ProtocolParams::new(g, None, None, delta, rho).unwrap();
        let mut daemon = Daemon::new(daemon_kind, seed);
        let run =
            run_computation(g, &params, task, clocks, &mut daemon, 3, 200_000, 12).unwrap();
        let want = expected_values(g, task, 12).unwrap();
        for phase in &run.phases {
            assert_eq!(phase.values, want, "phase {}", phase.phase);
            assert_eq!(phase.na_events, g.n() * params.delta() as usize);
            assert_eq!(
                phase.neighbor_reads,
                2 * g.edges().len() * params.delta() as usize
            );
        }
    }

    #[test]
    fn global_minimum_on_ring() {
        let g = ring(4);
        let task = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
            inputs: vec![7, 2, 9, 4],
        };
        // Diameter 2: delta = 3.
        check_task(&g, 3, 1, &task, DaemonKind::Synchronous, 0, &[0, 0, 0, 0]);
        check_task(&g, 3, 1, &task, DaemonKind::SingleRandom, 7, &[0, 1, 0, 1]);
        check_task(&g, 3, 1, &task, DaemonKind::RandomSubset { bias: 0.6 }, 3, &[2, -1, 0, 1]);
    }

    #[test]
    fn global_gcd_on_path() {
        let g = path(3);
        let task = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Gcd },
            inputs: vec![12, 18, 30],
        };
        check_task(&g, 3, 1, &task, DaemonKind::RandomSubset { bias: 0.5 }, 11, &[0, 0, 0]);
    }

    #[test]
    fn ball_minimum_on_path() {
        let g = path(4);
        let task = TaskSpec {
            kind: TaskKind::BallInfimum { op: InfimumOp::Min, rho: 1 },
            inputs: vec![2, 2, 2, 7],
        };
        check_task(&g, 2, 1, &task, DaemonKind::Synchronous, 0, &[0; 4]);
        check_task(&g, 2, 1, &task, DaemonKind::SingleMin, 0, &[0; 4]);
        check_task(&g, 2, 1, &task, DaemonKind::RandomSubset { bias: 0.7 }, 5, &[0, -2, 1, 0]);
    }

    #[test]
    fn ball_radius_two_on_star() {
        let g = star(4);
        let task = TaskSpec {
            kind: TaskKind::BallInfimum { op: InfimumOp::Min, rho: 2 },
            inputs: vec![9, 3, 8, 6, 5],
        };
        check_task(&g, 3, 2, &task, DaemonKind::RandomSubset { bias: 0.5 }, 2, &[0; 5]);
    }

    #[test]
    fn min_plus_shortest_paths_on_path() {
        let g = path(3);
        let system =
            RSystem::min_plus(&g, &HashMap::from([((0, 1), 1), ((1, 2), 1)]));
        let task = TaskSpec {
            kind: TaskKind::ROperator { system },
            inputs: vec![0, Value::MAX, Value::MAX],
        };
        // Longest simple path 2: delta = 3.
        check_task(&g, 3, 1, &task, DaemonKind::Synchronous, 0, &[0; 3]);
        check_task(&g, 3, 1, &task, DaemonKind::RandomSubset { bias: 0.5 }, 9, &[1, 0, -1]);
        assert_eq!(expected_values(&g, &task, 12).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn unstabilized_start_converges_then_computes() {
        let g = ring(4);
        let task = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
            inputs: vec![5, 5, 1, 5],
        };
        // Clocks violating WU0: stage 1 has to reset and converge first.
        let params = ProtocolParams::new(&g, None, None, 3, 1).unwrap();
        let clocks = [0, 3, 1, 4];
        assert!(!task.initial_configuration(&clocks).is_wu0(&g, &params));
        check_task(&g, 3, 1, &task, DaemonKind::RandomSubset { bias: 0.5 }, 13, &clocks);
    }

    #[test]
    fn timeout_is_reported() {
        let g = ring(4);
        let task = TaskSpec {
            kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
            inputs: vec![1, 2, 3, 4],
        };
        let params = ProtocolParams::new(&g, None, None, 3, 1).unwrap();
        let mut daemon = Daemon::new(DaemonKind::Synchronous, 0);
        let err = run_computation(&g, &params, &task, &[0; 4], &mut daemon, 50, 10, 12);
        assert!(err.is_err());
    }
}
