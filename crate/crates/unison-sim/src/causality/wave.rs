//! Wavelet / wave / strong-wave verification over a segment of the causal
//! DAG: decide events must causally depend, within the segment, on every
//! process of the required ball (wavelet/wave), and for strong waves every
//! simple walk ending at the deciding process must be realized by an
//! elementary causality chain.

use std::collections::HashSet;

use crate::topology::Graph;

use super::dag::{CausalDag, EventId};
use super::walk::simple_walks_ending_at;
use super::CausalityError;

/// Processes reachable from `event` through predecessor chains that stay
/// inside `segment` (the processes of the restricted past cone).
pub fn restricted_cover(
    dag: &CausalDag,
    event: EventId,
    segment: &HashSet<EventId>,
) -> HashSet<usize> {
    let mut seen = HashSet::from([event]);
    let mut stack = vec![event];
    let mut procs = HashSet::new();
    while let Some(e) = stack.pop() {
        procs.insert(dag.event(e).process);
        for &pr in dag.preds(e) {
            if segment.contains(&pr) && seen.insert(pr) {
                stack.push(pr);
            }
        }
    }
    procs
}

/// A segment is a `radius`-wavelet for the decide events when every process
/// decides at least once and every decide event of `p` covers the whole ball
/// of that radius around `p`.
pub fn verify_wavelet(
    g: &Graph,
    dag: &CausalDag,
    segment: &HashSet<EventId>,
    decide: &HashSet<EventId>,
    radius: usize,
) -> bool {
    let mut decided = vec![false; g.n()];
    for &e in decide {
        if !segment.contains(&e) {
            return false;
        }
        let p = dag.event(e).process;
        decided[p] = true;
        let ball: HashSet<usize> = g.ball(p, radius).into_iter().collect();
        if !ball.is_subset(&restricted_cover(dag, e, segment)) {
            return false;
        }
    }
    decided.iter().all(|&d| d)
}

/// A wave is a wavelet whose radius is the network diameter: decisions
/// depend on every process.
pub fn verify_wave(
    g: &Graph,
    dag: &CausalDag,
    segment: &HashSet<EventId>,
    decide: &HashSet<EventId>,
) -> bool {
    verify_wavelet(g, dag, segment, decide, g.diameter())
}

/// Strong wave: a wave where, for each decide event of `p`, every simple
/// walk ending at `p` is the collapse of the walk of some elementary
/// causality chain inside the segment ending at that event.
///
/// The chain search matches walks backwards with memoization; `max_work`
/// caps the total number of search states.
pub fn verify_strong_wave(
    g: &Graph,
    dag: &CausalDag,
    segment: &HashSet<EventId>,
    decide: &HashSet<EventId>,
    max_work: usize,
) -> Result<bool, CausalityError> {
    if !verify_wave(g, dag, segment, decide) {
        return Ok(false);
    }
    let mut work = 0usize;
    for &e in decide {
        let p = dag.event(e).process;
        for walk in simple_walks_ending_at(g, p, None) {
            if !chain_realizes(dag, segment, e, &walk, &mut work, max_work)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Backward search for a causality chain ending at `end` whose walk collapses
/// exactly to `walk`. States are (event, index of the letter still being
/// matched); predecessors may repeat the current letter or advance to the
/// previous one.
fn chain_realizes(
    dag: &CausalDag,
    segment: &HashSet<EventId>,
    end: EventId,
    walk: &[usize],
    work: &mut usize,
    max_work: usize,
) -> Result<bool, CausalityError> {
    let last = walk.len() - 1;
    debug_assert_eq!(dag.event(end).process, walk[last]);
    let mut seen = HashSet::from([(end, last)]);
    let mut stack = vec![(end, last)];
    while let Some((e, i)) = stack.pop() {
        *work += 1;
        if *work > max_work {
            return Err(CausalityError::Truncated(max_work));
        }
        if i == 0 {
            return Ok(true);
        }
        for &pr in dag.preds(e) {
            if !segment.contains(&pr) {
                continue;
            }
            let q = dag.event(pr).process;
            for next in [(pr, i), (pr, i - 1)] {
                if q == walk[next.1] && seen.insert(next) {
                    stack.push(next);
                }
            }
        }
    }
    Ok(false)
}
