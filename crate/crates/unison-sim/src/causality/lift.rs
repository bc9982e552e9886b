//! Lifting: unwinding the bounded clock of a stabilized execution into an
//! unbounded per-event virtual clock, anchored at a precedence-maximal
//! process. Cuts `C_k` collect, per process, the earliest event whose lifted
//! value reaches `k`.

use crate::phase_clock::delay_potentials;
use crate::protocol::{ActionKind, ProtocolParams};
use crate::scheduler::Execution;
use crate::topology::Graph;

use super::dag::{CausalDag, Cut, EventId};
use super::CausalityError;

#[derive(Debug, Clone)]
pub struct LiftedClocks {
    /// Anchor process (maximal under the precedence preorder of the initial
    /// configuration; ties broken by lowest index).
    pub anchor: usize,
    /// Lifted clock of the anchor's initial event.
    pub base: i64,
    /// Lifted clock value per event, indexed by `EventId`.
    values: Vec<i64>,
}

impl LiftedClocks {
    pub fn value(&self, id: EventId) -> i64 {
        self.values[id]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// Lifts a stabilized execution. Requires a WU0 initial configuration and
/// only normal actions (which hold from WU0 onward).
pub fn lift(
    g: &Graph,
    params: &ProtocolParams,
    execution: &Execution,
    dag: &CausalDag,
) -> Result<LiftedClocks, CausalityError> {
    let clocks = execution.initial.clocks();
    if !execution.initial.is_wu0(g, params) {
        return Err(CausalityError::NotWu0);
    }
    let pot = delay_potentials(g, params.sys().period(), &clocks)
        .ok_or(CausalityError::NotWu0)?;
    // Anchor: max potential, ties by lowest index. Any maximal choice yields
    // the same cuts since only potential differences enter.
    let anchor = (0..g.n())
        .max_by_key(|&p| (pot[p], std::cmp::Reverse(p)))
        .unwrap();
    let base = clocks[anchor];

    let mut values = vec![0i64; dag.len()];
    let mut current: Vec<i64> = (0..g.n()).map(|p| base + pot[p] - pot[anchor]).collect();
    for (id, ev) in dag.events().iter().enumerate() {
        if ev.is_initial() {
            values[id] = current[ev.process];
        } else {
            if ev.kind != Some(ActionKind::Normal) {
                return Err(CausalityError::NotStabilized(ev.process));
            }
            current[ev.process] += 1;
            values[id] = current[ev.process];
        }
    }
    Ok(LiftedClocks { anchor, base, values })
}

/// The cut `C_k`: per process, the earliest event whose lifted value is `k`.
pub fn cut_at(dag: &CausalDag, lifted: &LiftedClocks, k: i64) -> Result<Cut, CausalityError> {
    if k < lifted.base {
        return Err(CausalityError::BelowBase { k, base: lifted.base });
    }
    let mut events = Vec::with_capacity(dag.process_count());
    for p in 0..dag.process_count() {
        let id = dag
            .process_events(p)
            .iter()
            .copied()
            .find(|&e| lifted.value(e) == k)
            .ok_or(CausalityError::Incomplete(k, p))?;
        events.push(id);
    }
    let cut = Cut { events };
    debug_assert!(cut.is_coherent(dag), "lifted cut must be coherent");
    Ok(cut)
}

/// Events of the induced segment `[c1, c2]`: per process, everything between
/// its two cut events inclusive.
pub fn segment_events(
    dag: &CausalDag,
    c1: &Cut,
    c2: &Cut,
) -> Result<Vec<EventId>, CausalityError> {
    let mut out = Vec::new();
    for p in 0..dag.process_count() {
        let (lo, hi) = (dag.event(c1.events[p]).time, dag.event(c2.events[p]).time);
        if lo > hi {
            return Err(CausalityError::UnorderedCuts(p));
        }
        out.extend(
            dag.process_events(p)
                .iter()
                .copied()
                .filter(|&e| (lo..=hi).contains(&dag.event(e).time)),
        );
    }
    Ok(out)
}
