//! Walk machinery: words over the process alphabet whose consecutive letters
//! are equal or adjacent, the circular-factor contraction that reduces any
//! walk to a simple one, and walk covers of events (the walks of all
//! causality chains ending at an event inside a segment).

use std::collections::HashSet;

use crate::topology::Graph;

use super::dag::{CausalDag, EventId};
use super::CausalityError;

/// A walk is a nonempty vertex word; consecutive letters equal or adjacent.
pub type Walk = Vec<usize>;

pub fn is_walk(g: &Graph, w: &[usize]) -> bool {
    !w.is_empty()
        && w.windows(2)
            .all(|ab| ab[0] == ab[1] || g.neighbors(ab[0]).contains(&ab[1]))
}

/// Simple: no vertex repeats at all.
pub fn is_simple(w: &[usize]) -> bool {
    let mut seen = HashSet::new();
    w.iter().all(|&v| seen.insert(v))
}

/// Elementary: repeated letters only in contiguous runs.
pub fn is_elementary(w: &[usize]) -> bool {
    let mut closed = HashSet::new();
    for pair in w.windows(2) {
        if pair[0] != pair[1] {
            if closed.contains(&pair[1]) {
                return false;
            }
            closed.insert(pair[0]);
        }
    }
    true
}

/// Collapses runs of equal letters; for an elementary walk this is its unique
/// simple reduction.
pub fn collapse_runs(w: &[usize]) -> Walk {
    let mut out: Walk = Vec::with_capacity(w.len());
    for &v in w {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// Reduces a walk to a simple walk by repeatedly contracting the leftmost
/// shortest circular factor (a factor with equal endpoints, including the
/// one-step stutter `aa`) to its head.
pub fn reduce_walk(w: &[usize]) -> Walk {
    let mut w: Walk = w.to_vec();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] == w[j] && best.map_or(true, |(bi, bj)| (j - i, i) < (bj - bi, bi)) {
                    best = Some((i, j));
                }
            }
        }
        match best {
            None => return w,
            Some((i, j)) => {
                w.drain(i + 1..=j);
            }
        }
    }
}

/// All simple walks ending at `p`, optionally length-capped (`Σ_p`, `Σ_p^k`).
/// Includes the trivial walk `[p]`.
pub fn simple_walks_ending_at(g: &Graph, p: usize, max_len: Option<usize>) -> Vec<Walk> {
    let mut out = Vec::new();
    let mut prefix = vec![p];
    let mut on = vec![false; g.n()];
    on[p] = true;
    extend_simple(g, max_len, &mut prefix, &mut on, &mut out);
    // Walks were built end-first; flip them.
    for w in &mut out {
        w.reverse();
    }
    out
}

fn extend_simple(
    g: &Graph,
    max_len: Option<usize>,
    prefix: &mut Walk,
    on: &mut Vec<bool>,
    out: &mut Vec<Walk>,
) {
    out.push(prefix.clone());
    if max_len.is_some_and(|m| prefix.len() - 1 >= m) {
        return;
    }
    let last = *prefix.last().unwrap();
    for &q in g.neighbors(last) {
        if !on[q] {
            on[q] = true;
            prefix.push(q);
            extend_simple(g, max_len, prefix, on, out);
            prefix.pop();
            on[q] = false;
        }
    }
}

/// The walk cover of `event` inside the segment: walks of every causality
/// chain within `segment` ending at `event`, always containing the trivial
/// walk. Enumeration work is capped by `max_work`.
pub fn walk_cover(
    dag: &CausalDag,
    event: EventId,
    segment: &HashSet<EventId>,
    max_work: usize,
) -> Result<HashSet<Walk>, CausalityError> {
    let mut walks = HashSet::new();
    let mut work = 0usize;
    // Chains are enumerated backwards from the event; `suffix` holds the walk
    // read right-to-left.
    let mut suffix: Walk = vec![dag.event(event).process];
    collect_chains(dag, event, segment, &mut suffix, &mut walks, &mut work, max_work)?;
    Ok(walks)
}

fn collect_chains(
    dag: &CausalDag,
    at: EventId,
    segment: &HashSet<EventId>,
    suffix: &mut Walk,
    walks: &mut HashSet<Walk>,
    work: &mut usize,
    max_work: usize,
) -> Result<(), CausalityError> {
    *work += 1;
    if *work > max_work {
        return Err(CausalityError::Truncated(max_work));
    }
    let mut walk = suffix.clone();
    walk.reverse();
    walks.insert(walk);
    for &pr in dag.preds(at) {
        if segment.contains(&pr) {
            suffix.push(dag.event(pr).process);
            collect_chains(dag, pr, segment, suffix, walks, work, max_work)?;
            suffix.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Configuration, NoopCs, ProtocolParams};
    use crate::scheduler::{run, Daemon, DaemonKind};
    use crate::topology::families::{path, ring};

    #[test]
    fn walk_predicates() {
        let g = path(3);
        assert!(is_walk(&g, &[0, 1, 1, 2]));
        assert!(!is_walk(&g, &[0, 2]));
        assert!(!is_walk(&g, &[]));

        assert!(is_simple(&[0, 1, 2]));
        assert!(!is_simple(&[0, 1, 0]));

        assert!(is_elementary(&[0, 0, 1, 1, 2]));
        assert!(!is_elementary(&[0, 1, 0]));
        assert_eq!(collapse_runs(&[0, 0, 1, 1, 2, 2]), vec![0, 1, 2]);
    }

    #[test]
    fn reduce_examples() {
        // Whole word circular.
        assert_eq!(reduce_walk(&[0, 1, 2, 0]), vec![0]);
        // Leftmost shortest circular factor of abab is aba.
        assert_eq!(reduce_walk(&[0, 1, 0, 1]), vec![0, 1]);
        // Already simple: fixed point.
        assert_eq!(reduce_walk(&[0, 1, 2]), vec![0, 1, 2]);
        // Stutters contract.
        assert_eq!(reduce_walk(&[0, 0, 1]), vec![0, 1]);
    }

    #[test]
    fn reduction_reachable_by_single_contractions() {
        // Every reduce_walk output is reachable through the one-step
        // contraction relation and is simple.
        fn contractions(w: &[usize]) -> Vec<Walk> {
            let mut out = Vec::new();
            for i in 0..w.len() {
                for j in i + 1..w.len() {
                    if w[i] == w[j] {
                        let mut v = w.to_vec();
                        v.drain(i + 1..=j);
                        out.push(v);
                    }
                }
            }
            out
        }
        fn reachable(w: &[usize], target: &[usize]) -> bool {
            if w == target {
                return true;
            }
            contractions(w).iter().any(|v| reachable(v, target))
        }
        for w in [vec![0, 1, 0, 1], vec![0, 1, 2, 0, 1], vec![2, 2, 1, 0, 1, 2]] {
            let r = reduce_walk(&w);
            assert!(is_simple(&r));
            assert!(reachable(&w, &r), "{w:?} cannot reach {r:?}");
        }
    }

    #[test]
    fn simple_walk_enumeration() {
        let g = ring(3);
        let walks = simple_walks_ending_at(&g, 0, None);
        // [0], two length-1, two length-2.
        assert_eq!(walks.len(), 5);
        assert!(walks.contains(&vec![0]));
        assert!(walks.contains(&vec![1, 2, 0]));
        let capped = simple_walks_ending_at(&g, 0, Some(1));
        assert_eq!(capped.len(), 3);
        for w in &walks {
            assert!(is_simple(w));
            assert_eq!(*w.last().unwrap(), 0);
        }
    }

    #[test]
    fn walk_cover_of_one_synchronous_step() {
        let g = path(2);
        let p = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
        let mut d = Daemon::new(DaemonKind::Synchronous, 0);
        let exec = run(&g, &p, Configuration::uniform(2, 0), &mut d, &NoopCs, 1, |_| false).unwrap();
        let dag = CausalDag::build(&g, &exec);
        let segment: HashSet<EventId> = (0..dag.len()).collect();

        // Initial event: just the trivial walk.
        let wc0 = walk_cover(&dag, dag.process_events(0)[0], &segment, 10_000).unwrap();
        assert_eq!(wc0, HashSet::from([vec![0]]));

        // After one step at p: trivial, self-chain, and the neighbor chain.
        let wc = walk_cover(&dag, dag.process_events(0)[1], &segment, 10_000).unwrap();
        assert_eq!(
            wc,
            HashSet::from([vec![0], vec![0, 0], vec![1, 0]])
        );
    }

    #[test]
    fn walk_cover_closed_under_reduction_on_tiny_instance() {
        // Every cover walk reduces to a simple walk that is itself realized
        // by some chain in the cover.
        let g = ring(3);
        let p = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
        let mut d = Daemon::new(DaemonKind::Synchronous, 0);
        let exec = run(&g, &p, Configuration::uniform(3, 0), &mut d, &NoopCs, 3, |_| false).unwrap();
        let dag = CausalDag::build(&g, &exec);
        let segment: HashSet<EventId> = (0..dag.len()).collect();
        for q in 0..3 {
            let ev = dag.process_events(q)[3];
            let wc = walk_cover(&dag, ev, &segment, 1_000_000).unwrap();
            for m in &wc {
                let elementary: Vec<_> = wc
                    .iter()
                    .filter(|w| is_elementary(w))
                    .collect();
                let reduced = reduce_walk(m);
                assert!(
                    elementary.iter().any(|w| collapse_runs(w) == reduced),
                    "no elementary witness for {m:?}"
                );
            }
        }
    }

    #[test]
    fn walk_cover_truncates() {
        let g = ring(3);
        let p = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
        let mut d = Daemon::new(DaemonKind::Synchronous, 0);
        let exec = run(&g, &p, Configuration::uniform(3, 0), &mut d, &NoopCs, 6, |_| false).unwrap();
        let dag = CausalDag::build(&g, &exec);
        let segment: HashSet<EventId> = (0..dag.len()).collect();
        let ev = dag.process_events(0)[6];
        assert_eq!(
            walk_cover(&dag, ev, &segment, 10),
            Err(CausalityError::Truncated(10))
        );
    }
}
