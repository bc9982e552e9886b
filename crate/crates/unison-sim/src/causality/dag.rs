//! The causal DAG of an execution. Events are `(process, time)` pairs where
//! time indexes the configuration produced by the transition; every process
//! also has an initial event at time 0. Each event receives one edge from its
//! latest prior self-event and one from the latest prior event of each
//! neighbor (events of the same transition do not see each other).

use std::collections::HashSet;

use serde_json::json;

use crate::protocol::{ActionKind, CsKind};
use crate::scheduler::Execution;
use crate::topology::Graph;

pub type EventId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub process: usize,
    /// Index of the configuration this event produced; 0 for initial events.
    pub time: usize,
    /// `None` for initial events.
    pub kind: Option<ActionKind>,
    pub cs: Option<CsKind>,
    pub clock_after: i64,
}

impl Event {
    pub fn is_initial(&self) -> bool {
        self.time == 0
    }
}

#[derive(Debug, Clone)]
pub struct CausalDag {
    events: Vec<Event>,
    /// Event ids per process, ascending in time.
    by_process: Vec<Vec<EventId>>,
    /// Incoming edges (rule 1 and rule 2 combined).
    preds: Vec<Vec<EventId>>,
    succs: Vec<Vec<EventId>>,
}

impl CausalDag {
    pub fn build(g: &Graph, execution: &Execution) -> Self {
        let n = g.n();
        let mut events = Vec::new();
        let mut by_process = vec![Vec::new(); n];
        let mut last: Vec<EventId> = (0..n).collect();
        for (p, state) in execution.initial.states.iter().enumerate() {
            events.push(Event {
                process: p,
                time: 0,
                kind: None,
                cs: None,
                clock_after: state.r,
            });
            by_process[p].push(p);
        }
        let mut preds: Vec<Vec<EventId>> = vec![Vec::new(); n];
        for (t, rec) in execution.steps.iter().enumerate() {
            let snapshot = last.clone();
            for ev in &rec.events {
                let id = events.len();
                events.push(Event {
                    process: ev.process,
                    time: t + 1,
                    kind: Some(ev.kind),
                    cs: ev.cs,
                    clock_after: ev.clock_after,
                });
                by_process[ev.process].push(id);
                let mut incoming = vec![snapshot[ev.process]];
                incoming.extend(g.neighbors(ev.process).iter().map(|&q| snapshot[q]));
                preds.push(incoming);
                last[ev.process] = id;
            }
        }
        let mut succs = vec![Vec::new(); events.len()];
        for (id, ps) in preds.iter().enumerate() {
            for &p in ps {
                succs[p].push(id);
            }
        }
        CausalDag { events, by_process, preds, succs }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event(&self, id: EventId) -> &Event {
        &self.events[id]
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn preds(&self, id: EventId) -> &[EventId] {
        &self.preds[id]
    }

    pub fn succs(&self, id: EventId) -> &[EventId] {
        &self.succs[id]
    }

    pub fn process_events(&self, p: usize) -> &[EventId] {
        &self.by_process[p]
    }

    pub fn process_count(&self) -> usize {
        self.by_process.len()
    }

    /// All events causally at or before `id` (the past cone).
    pub fn past_cone(&self, id: EventId) -> HashSet<EventId> {
        let mut seen = HashSet::from([id]);
        let mut stack = vec![id];
        while let Some(e) = stack.pop() {
            for &p in &self.preds[e] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// `a ⪯ b` in the causal order.
    pub fn precedes(&self, a: EventId, b: EventId) -> bool {
        if a == b {
            return true;
        }
        if self.events[a].time > self.events[b].time {
            return false;
        }
        let mut seen = HashSet::from([b]);
        let mut stack = vec![b];
        while let Some(e) = stack.pop() {
            for &p in &self.preds[e] {
                if p == a {
                    return true;
                }
                if self.events[p].time >= self.events[a].time && seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        false
    }

    /// Processes covered by the past cone of `id`.
    pub fn cover(&self, id: EventId) -> HashSet<usize> {
        self.past_cone(id)
            .into_iter()
            .map(|e| self.events[e].process)
            .collect()
    }

    /// Edge-list export with `"p@t"` event ids.
    pub fn export_json(&self) -> serde_json::Value {
        let name = |id: EventId| {
            let e = &self.events[id];
            format!("{}@{}", e.process, e.time)
        };
        let mut edges = Vec::new();
        for (id, ps) in self.preds.iter().enumerate() {
            for &p in ps {
                edges.push(json!([name(p), name(id)]));
            }
        }
        json!({
            "version": 1,
            "events": (0..self.events.len()).map(name).collect::<Vec<_>>(),
            "edges": edges,
        })
    }
}

/// A cut: one event per process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    /// Event id for each process, indexed by process.
    pub events: Vec<EventId>,
}

impl Cut {
    /// Coherent iff left-closed under the causal order: any event in the past
    /// cone of a cut event lies at or before its own process's cut event.
    pub fn is_coherent(&self, dag: &CausalDag) -> bool {
        self.events.iter().all(|&cut_ev| {
            dag.past_cone(cut_ev).iter().all(|&e| {
                let q = dag.event(e).process;
                dag.event(e).time <= dag.event(self.events[q]).time
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Configuration, NoopCs, ProtocolParams};
    use crate::scheduler::{replay, run, Daemon, DaemonKind};
    use crate::topology::families::{path, ring};

    fn params(g: &Graph, delta: i64) -> ProtocolParams {
        ProtocolParams::new(g, None, None, delta, 1).unwrap()
    }

    #[test]
    fn synchronous_edge_two_steps() {
        let g = path(2);
        let p = params(&g, 1);
        let conf = Configuration::uniform(2, 0);
        let mut d = Daemon::new(DaemonKind::Synchronous, 0);
        let exec = run(&g, &p, conf, &mut d, &NoopCs, 2, |_| false).unwrap();
        let dag = CausalDag::build(&g, &exec);
        // 2 initial + 2 per step.
        assert_eq!(dag.len(), 6);
        // (p, 2) has incoming edges from (p, 1) and (q, 1), both directions.
        for p_id in 0..2usize {
            let e2 = dag.process_events(p_id)[2];
            let mut pred_names: Vec<(usize, usize)> = dag
                .preds(e2)
                .iter()
                .map(|&e| (dag.event(e).process, dag.event(e).time))
                .collect();
            pred_names.sort_unstable();
            assert_eq!(pred_names, vec![(0, 1), (1, 1)]);
        }
    }

    #[test]
    fn single_process_steps_form_a_self_chain() {
        let g = path(2);
        let p = params(&g, 1);
        let conf = Configuration::uniform(2, 0);
        let exec = replay(&g, &p, conf, &[vec![0]], &NoopCs).unwrap();
        let dag = CausalDag::build(&g, &exec);
        let e = dag.process_events(0)[1];
        // Self edge plus the neighbor's initial event.
        assert_eq!(dag.preds(e).len(), 2);
        assert!(dag.precedes(dag.process_events(0)[0], e));
    }

    #[test]
    fn event_at_first_step_covers_closed_neighborhood() {
        let g = ring(5);
        let p = params(&g, 1);
        let mut d = Daemon::new(DaemonKind::Synchronous, 0);
        let exec = run(&g, &p, Configuration::uniform(5, 0), &mut d, &NoopCs, 4, |_| false).unwrap();
        let dag = CausalDag::build(&g, &exec);
        // Initial events cover only their own process.
        for q in 0..5 {
            assert_eq!(dag.cover(dag.process_events(q)[0]), HashSet::from([q]));
        }
        // First-step events cover the closed neighborhood.
        let e = dag.process_events(2)[1];
        assert_eq!(dag.cover(e), HashSet::from([1, 2, 3]));
        // After diameter-many synchronous steps, the whole network.
        let d5 = g.diameter();
        for q in 0..5 {
            let e = dag.process_events(q)[d5];
            assert_eq!(dag.cover(e).len(), 5);
        }
    }

    #[test]
    fn precedence_matches_transitive_closure_oracle() {
        let g = ring(3);
        let p = params(&g, 1);
        let mut d = Daemon::new(DaemonKind::RandomSubset { bias: 0.5 }, 9);
        let conf = Configuration::uniform(3, 1);
        let exec = run(&g, &p, conf, &mut d, &NoopCs, 8, |_| false).unwrap();
        let dag = CausalDag::build(&g, &exec);

        // Floyd–Warshall-style closure over the edge relation.
        let m = dag.len();
        let mut reach = vec![vec![false; m]; m];
        for a in 0..m {
            reach[a][a] = true;
            for &b in dag.preds(a) {
                reach[b][a] = true;
            }
        }
        for k in 0..m {
            for i in 0..m {
                if reach[i][k] {
                    for j in 0..m {
                        reach[i][j] |= reach[k][j];
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                assert_eq!(dag.precedes(a, b), reach[a][b], "({a}, {b})");
                // Antisymmetry.
                if a != b && reach[a][b] {
                    assert!(!reach[b][a]);
                }
            }
        }
    }
}
