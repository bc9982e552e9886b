//! The finite incrementing system and its delay algebra: local comparability
//! on the clock torus, the `⊖` step, path delay, intrinsic delay, and the
//! unison predicates WU / WU0.
//!
//! Clock values are signed integers in `[-alpha, K-1]`. Tail values
//! `{-alpha, .., 0}` form the reset ramp; stab values `{0, .., K-1}` are the
//! cyclic phase. All torus arithmetic normalizes through `rem_euclid`, so
//! negative intermediates never leak.

use thiserror::Error;

use crate::topology::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClockError {
    #[error("value {0} outside clock domain [{1}, {2}]")]
    OutOfDomain(i64, i64, i64),
    #[error("values {0} and {1} are not locally comparable modulo {2}")]
    NotLocallyComparable(i64, i64, i64),
    #[error("period must be >= 2, got {0}")]
    BadPeriod(i64),
    #[error("tail depth must be >= 1, got {0}")]
    BadTail(i64),
}

/// A finite incrementing system: domain `{-alpha, .., 0, .., K-1}` with the
/// increment stepping up the tail and wrapping modulo `K` on stab values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncSystem {
    k: i64,
    alpha: i64,
}

impl IncSystem {
    pub fn new(k: i64, alpha: i64) -> Result<Self, ClockError> {
        if k < 2 {
            return Err(ClockError::BadPeriod(k));
        }
        if alpha < 1 {
            return Err(ClockError::BadTail(alpha));
        }
        Ok(IncSystem { k, alpha })
    }

    pub fn period(&self) -> i64 {
        self.k
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn contains(&self, x: i64) -> bool {
        -self.alpha <= x && x < self.k
    }

    pub fn in_stab(&self, x: i64) -> bool {
        0 <= x && x < self.k
    }

    pub fn in_tail(&self, x: i64) -> bool {
        -self.alpha <= x && x <= 0
    }

    /// `tail* = tail \ {0}`.
    pub fn in_tail_star(&self, x: i64) -> bool {
        -self.alpha <= x && x < 0
    }

    pub fn phi(&self, x: i64) -> Result<i64, ClockError> {
        if !self.contains(x) {
            return Err(ClockError::OutOfDomain(x, -self.alpha, self.k - 1));
        }
        Ok(if x >= 0 { (x + 1).rem_euclid(self.k) } else { x + 1 })
    }

    /// Number of domain values, `alpha + K`.
    pub fn domain_size(&self) -> i64 {
        self.alpha + self.k
    }
}

/// Distance on the torus `[0, K-1]`: `min((a-b) mod K, (b-a) mod K)`.
pub fn torus_distance(k: i64, a: i64, b: i64) -> i64 {
    let d = (a - b).rem_euclid(k);
    d.min(k - d)
}

pub fn locally_comparable(k: i64, a: i64, b: i64) -> bool {
    torus_distance(k, a, b) <= 1
}

/// `b ⊖ a`: +1 when `b` is one step ahead of `a` on the torus, -1 when one
/// behind, 0 when equal. Only defined for locally comparable residues.
pub fn local_minus(k: i64, b: i64, a: i64) -> Result<i64, ClockError> {
    if !locally_comparable(k, a, b) {
        return Err(ClockError::NotLocallyComparable(a, b, k));
    }
    let fwd = (b - a).rem_euclid(k);
    Ok(if fwd <= 1 { fwd } else { -((a - b).rem_euclid(k)) })
}

/// Local variation of a sequence of residues: the sum of consecutive `⊖`
/// steps, 0 for length-0 paths.
pub fn path_delay(k: i64, values: &[i64]) -> Result<i64, ClockError> {
    let mut sum = 0;
    for w in values.windows(2) {
        sum += local_minus(k, w[1], w[0])?;
    }
    Ok(sum)
}

/// WU: every clock in stab and every neighboring pair locally comparable.
pub fn check_wu(g: &Graph, sys: &IncSystem, clocks: &[i64]) -> bool {
    debug_assert_eq!(clocks.len(), g.n());
    clocks.iter().all(|&r| sys.in_stab(r))
        && g.edges()
            .iter()
            .all(|&(u, v)| locally_comparable(sys.period(), clocks[u], clocks[v]))
}

/// Per-process delay potentials relative to process 0, when the delay is
/// intrinsic (path-independent). Returns `None` on any configuration where a
/// neighboring pair is not locally comparable or where some cycle carries a
/// nonzero delay.
///
/// A BFS spanning tree fixes the potentials; checking every remaining edge
/// against them is equivalent to a zero delay around each fundamental cycle,
/// and the cycle space is spanned by those.
pub fn delay_potentials(g: &Graph, k: i64, clocks: &[i64]) -> Option<Vec<i64>> {
    let mut pot = vec![i64::MAX; g.n()];
    let mut queue = std::collections::VecDeque::new();
    pot[0] = 0;
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            let step = local_minus(k, clocks[v], clocks[u]).ok()?;
            if pot[v] == i64::MAX {
                pot[v] = pot[u] + step;
                queue.push_back(v);
            } else if pot[v] != pot[u] + step {
                return None;
            }
        }
    }
    Some(pot)
}

/// WU0: WU plus intrinsic (path-independent) delay.
pub fn check_wu0(g: &Graph, sys: &IncSystem, clocks: &[i64]) -> bool {
    check_wu(g, sys, clocks) && delay_potentials(g, sys.period(), clocks).is_some()
}

/// Intrinsic delay from `p` to `q`; requires a WU0 configuration.
pub fn intrinsic_delay(g: &Graph, sys: &IncSystem, clocks: &[i64], p: usize, q: usize) -> Option<i64> {
    let pot = delay_potentials(g, sys.period(), clocks)?;
    Some(pot[q] - pot[p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::families::{path, ring};
    use proptest::prelude::*;

    fn sys53() -> IncSystem {
        IncSystem::new(5, 3).unwrap()
    }

    #[test]
    fn phi_steps() {
        let s = sys53();
        assert_eq!(s.phi(-3).unwrap(), -2);
        assert_eq!(s.phi(0).unwrap(), 1);
        assert_eq!(s.phi(4).unwrap(), 0);
        assert_eq!(s.phi(5), Err(ClockError::OutOfDomain(5, -3, 4)));
    }

    #[test]
    fn phi_iterates_tail_then_cycles() {
        let s = sys53();
        let mut x = -3;
        for _ in 0..3 {
            x = s.phi(x).unwrap();
        }
        assert_eq!(x, 0);
        let mut seen = vec![x];
        for _ in 0..5 {
            x = s.phi(x).unwrap();
            seen.push(x);
        }
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 0]);
    }

    #[test]
    fn torus_distances() {
        assert_eq!(torus_distance(5, 4, 0), 1);
        assert_eq!(torus_distance(5, 2, 4), 2);
        assert_eq!(torus_distance(5, 3, 3), 0);
    }

    #[test]
    fn local_minus_cases() {
        assert_eq!(local_minus(5, 0, 4).unwrap(), 1);
        assert_eq!(local_minus(5, 4, 0).unwrap(), -1);
        assert_eq!(local_minus(5, 3, 3).unwrap(), 0);
        assert!(local_minus(5, 2, 4).is_err());
    }

    #[test]
    fn path_delays() {
        assert_eq!(path_delay(5, &[0, 1, 1, 2]).unwrap(), 2);
        assert_eq!(path_delay(5, &[3]).unwrap(), 0);
        assert_eq!(path_delay(5, &[4, 0, 4]).unwrap(), 0);
        assert!(path_delay(5, &[0, 2]).is_err());
    }

    #[test]
    fn wu_predicate() {
        let g = ring(4);
        let s = IncSystem::new(6, 4).unwrap();
        assert!(check_wu(&g, &s, &[2, 2, 2, 2]));
        assert!(!check_wu(&g, &s, &[2, 2, -1, 2]));
        assert!(!check_wu(&g, &s, &[0, 2, 0, 2]));
    }

    #[test]
    fn wu0_predicate() {
        // Trees in WU are always WU0.
        let t = path(4);
        let s = IncSystem::new(6, 4).unwrap();
        assert!(check_wu0(&t, &s, &[0, 1, 1, 2]));

        // Ring of 5 with full wrap-around delay: WU but not WU0.
        let r = ring(5);
        let s5 = IncSystem::new(5, 3).unwrap();
        assert!(check_wu(&r, &s5, &[0, 1, 2, 3, 4]));
        assert!(!check_wu0(&r, &s5, &[0, 1, 2, 3, 4]));

        // Same ring, larger period, delay sums to zero around the cycle.
        let s6 = IncSystem::new(6, 4).unwrap();
        assert!(check_wu0(&r, &s6, &[0, 0, 1, 1, 0]));
    }

    #[test]
    fn intrinsic_delay_bounded_by_distance() {
        let g = ring(6);
        let s = IncSystem::new(8, 4).unwrap();
        let clocks = vec![3, 4, 4, 3, 3, 3];
        assert!(check_wu0(&g, &s, &clocks));
        for p in 0..6 {
            for q in 0..6 {
                let d = intrinsic_delay(&g, &s, &clocks, p, q).unwrap();
                assert!(d.unsigned_abs() as usize <= g.distance(p, q));
            }
        }
    }

    #[test]
    fn wu0_implies_path_independence_on_random_walks() {
        use rand::{Rng, SeedableRng};
        let g = ring(5);
        let s = IncSystem::new(7, 4).unwrap();
        let clocks = vec![2, 3, 3, 2, 2];
        assert!(check_wu0(&g, &s, &clocks));
        let expected = intrinsic_delay(&g, &s, &clocks, 0, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut found = 0;
        for _ in 0..200 {
            // Random walk from 0; whenever it visits 2, its delay so far must
            // equal the intrinsic delay.
            let mut at = 0usize;
            let mut walk = vec![clocks[0]];
            for _ in 0..12 {
                let nb = g.neighbors(at);
                at = nb[rng.gen_range(0..nb.len())];
                walk.push(clocks[at]);
                if at == 2 {
                    assert_eq!(path_delay(s.period(), &walk).unwrap(), expected);
                    found += 1;
                    break;
                }
            }
        }
        assert!(found >= 50);
    }

    proptest! {
        #[test]
        fn local_minus_antisymmetric(a in 0i64..9, b in 0i64..9) {
            let k = 9;
            if locally_comparable(k, a, b) {
                let ab = local_minus(k, b, a).unwrap();
                let ba = local_minus(k, a, b).unwrap();
                prop_assert_eq!(ab, -ba);
                prop_assert_eq!(ab.abs(), torus_distance(k, a, b));
            }
        }

        #[test]
        fn path_delay_concatenation(values in proptest::collection::vec(0i64..7, 1..12), split in 0usize..12) {
            let k = 7;
            // Make consecutive values locally comparable by cumulative steps.
            let mut seq = vec![values[0]];
            for v in &values[1..] {
                let step = (v % 3) - 1;
                let last = *seq.last().unwrap();
                seq.push((last + step).rem_euclid(k));
            }
            let cut = split % seq.len();
            let total = path_delay(k, &seq).unwrap();
            let left = path_delay(k, &seq[..=cut]).unwrap();
            let right = path_delay(k, &seq[cut..]).unwrap();
            prop_assert_eq!(total, left + right);
        }
    }
}
