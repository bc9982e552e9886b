//! The guarded-action state machine: normal / convergence / reset guards,
//! atomic action application with critical-section hooks, and the
//! simultaneous set-step semantics of the shared-register model.
//!
//! The clock register lives in an incrementing system of period
//! `delta * k_phase`; the virtual phase register is the integer division of
//! the clock by `delta`. The critical sections fire on normal steps only:
//! CS2 on the increment into a phase boundary, CS1 on every other increment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase_clock::{check_wu, ClockError, IncSystem};
use crate::topology::Graph;

/// Aggregation register contents. Operator semantics live in `aggregation`;
/// the protocol only copies these around.
pub type Value = i64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("process {0} has no enabled action")]
    NotEnabled(usize),
    #[error("empty choice of processes")]
    EmptyChoice,
    #[error("clock {value} of process {process} outside domain")]
    BadClock { process: usize, value: i64 },
    #[error("delta * K = {dk} does not exceed the cyclomatic bound {cg}")]
    PeriodTooSmall { dk: i64, cg: i64 },
    #[error("delta {delta} smaller than rho {rho}")]
    DeltaBelowRho { delta: i64, rho: i64 },
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// Protocol parameters: the unison incrementing system together with the
/// phase subdivision `delta` and the synchronization distance `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolParams {
    sys: IncSystem,
    k_phase: i64,
    delta: i64,
    rho: i64,
}

impl ProtocolParams {
    /// Builds validated parameters. `k_phase` defaults to `n + 1` and is
    /// raised until `delta * k_phase` exceeds the graph's cyclomatic upper
    /// bound; `alpha` defaults to `n`.
    pub fn new(
        g: &Graph,
        k_phase: Option<i64>,
        alpha: Option<i64>,
        delta: i64,
        rho: i64,
    ) -> Result<Self, ProtocolError> {
        let n = g.n() as i64;
        if delta < rho {
            return Err(ProtocolError::DeltaBelowRho { delta, rho });
        }
        let cg = g.cyclomatic_upper_bound() as i64;
        let mut k_phase = k_phase.unwrap_or(n + 1).max(3);
        while delta * k_phase <= cg {
            k_phase += 1;
        }
        let alpha = alpha.unwrap_or(n);
        let sys = IncSystem::new(delta * k_phase, alpha)?;
        Ok(ProtocolParams { sys, k_phase, delta, rho })
    }

    /// Parameters without the `delta * K > C_G` check, for deadlock
    /// experiments with deliberately short clocks.
    pub fn unchecked(k_phase: i64, alpha: i64, delta: i64, rho: i64) -> Result<Self, ProtocolError> {
        let sys = IncSystem::new(delta * k_phase, alpha)?;
        Ok(ProtocolParams { sys, k_phase, delta, rho })
    }

    pub fn validate_against(&self, g: &Graph) -> Result<(), ProtocolError> {
        let cg = g.cyclomatic_upper_bound() as i64;
        let dk = self.sys.period();
        if dk <= cg {
            return Err(ProtocolError::PeriodTooSmall { dk, cg });
        }
        Ok(())
    }

    pub fn sys(&self) -> &IncSystem {
        &self.sys
    }

    pub fn k_phase(&self) -> i64 {
        self.k_phase
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn rho(&self) -> i64 {
        self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessState {
    pub r: i64,
    pub v0: Value,
    pub v1: Value,
    pub v2: Value,
    pub res: Value,
}

impl ProcessState {
    pub fn with_clock(r: i64) -> Self {
        ProcessState { r, v0: 0, v1: 0, v2: 0, res: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub states: Vec<ProcessState>,
}

impl Configuration {
    pub fn from_clocks(clocks: &[i64]) -> Self {
        Configuration {
            states: clocks.iter().map(|&r| ProcessState::with_clock(r)).collect(),
        }
    }

    pub fn uniform(n: usize, r: i64) -> Self {
        Configuration::from_clocks(&vec![r; n])
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn clocks(&self) -> Vec<i64> {
        self.states.iter().map(|s| s.r).collect()
    }

    pub fn is_wu(&self, g: &Graph, params: &ProtocolParams) -> bool {
        check_wu(g, params.sys(), &self.clocks())
    }

    pub fn is_wu0(&self, g: &Graph, params: &ProtocolParams) -> bool {
        crate::phase_clock::check_wu0(g, params.sys(), &self.clocks())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    /// NA: increment with critical section.
    Normal,
    /// CA: tail climb.
    Convergence,
    /// RA: reset to the tail bottom.
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsKind {
    Cs1,
    Cs2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    pub normal: bool,
    pub convergence: bool,
    pub reset: bool,
    pub locally_correct: bool,
}

impl Guards {
    pub fn any(&self) -> bool {
        self.normal || self.convergence || self.reset
    }
}

/// Evaluates the four predicates of the protocol at process `p`.
pub fn guards(g: &Graph, params: &ProtocolParams, conf: &Configuration, p: usize) -> Guards {
    let sys = params.sys();
    let rp = conf.states[p].r;
    let phi_rp = sys.phi(rp).ok();

    let normal = sys.in_stab(rp)
        && g.neighbors(p).iter().all(|&q| {
            let rq = conf.states[q].r;
            rq == rp || Some(rq) == phi_rp
        });

    let locally_correct = sys.in_stab(rp)
        && g.neighbors(p).iter().all(|&q| {
            let rq = conf.states[q].r;
            sys.in_stab(rq) && (rp == rq || Some(rp) == sys.phi(rq).ok() || Some(rq) == phi_rp)
        });

    let convergence = sys.in_tail_star(rp)
        && g.neighbors(p).iter().all(|&q| {
            let rq = conf.states[q].r;
            sys.in_tail(rq) && rp <= rq
        });

    // Reset fires only from stab values that are locally incorrect: after a
    // reset the clock sits in the tail and the guard stays off.
    let reset = !locally_correct && !sys.in_tail(rp);

    Guards { normal, convergence, reset, locally_correct }
}

pub fn enabled_processes(g: &Graph, params: &ProtocolParams, conf: &Configuration) -> Vec<usize> {
    (0..g.n())
        .filter(|&p| guards(g, params, conf, p).any())
        .collect()
}

/// Register updates produced by a critical section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Registers {
    pub v0: Value,
    pub v1: Value,
    pub v2: Value,
    pub res: Value,
}

impl Registers {
    pub fn of(state: &ProcessState) -> Self {
        Registers { v0: state.v0, v1: state.v1, v2: state.v2, res: state.res }
    }
}

/// Critical-section hooks invoked on normal steps. Implementations read the
/// pre-step configuration only.
pub trait CsHandler {
    fn cs1(&self, g: &Graph, params: &ProtocolParams, conf: &Configuration, p: usize) -> Registers;
    fn cs2(&self, g: &Graph, params: &ProtocolParams, conf: &Configuration, p: usize) -> Registers;
}

/// Handler that leaves the aggregation registers alone (pure unison runs).
pub struct NoopCs;

impl CsHandler for NoopCs {
    fn cs1(&self, _: &Graph, _: &ProtocolParams, conf: &Configuration, p: usize) -> Registers {
        Registers::of(&conf.states[p])
    }

    fn cs2(&self, _: &Graph, _: &ProtocolParams, conf: &Configuration, p: usize) -> Registers {
        Registers::of(&conf.states[p])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTag {
    pub kind: ActionKind,
    pub cs: Option<CsKind>,
}

/// One process's executed action within a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub process: usize,
    pub kind: ActionKind,
    pub cs: Option<CsKind>,
    pub clock_before: i64,
    pub clock_after: i64,
}

fn apply_one<H: CsHandler>(
    g: &Graph,
    params: &ProtocolParams,
    conf: &Configuration,
    p: usize,
    handler: &H,
) -> Result<(ProcessState, ActionTag), ProtocolError> {
    let gs = guards(g, params, conf, p);
    debug_assert!(
        [gs.normal, gs.convergence, gs.reset].iter().filter(|&&b| b).count() <= 1,
        "guards must be mutually exclusive at process {p}"
    );
    let sys = params.sys();
    let mut state = conf.states[p];
    let tag = if gs.normal {
        let cs = if state.r.rem_euclid(params.delta()) == params.delta() - 1 {
            CsKind::Cs2
        } else {
            CsKind::Cs1
        };
        let regs = match cs {
            CsKind::Cs1 => handler.cs1(g, params, conf, p),
            CsKind::Cs2 => handler.cs2(g, params, conf, p),
        };
        state.v0 = regs.v0;
        state.v1 = regs.v1;
        state.v2 = regs.v2;
        state.res = regs.res;
        state.r = sys.phi(state.r)?;
        ActionTag { kind: ActionKind::Normal, cs: Some(cs) }
    } else if gs.convergence {
        state.r = sys.phi(state.r)?;
        ActionTag { kind: ActionKind::Convergence, cs: None }
    } else if gs.reset {
        state.r = -sys.alpha();
        ActionTag { kind: ActionKind::Reset, cs: None }
    } else {
        return Err(ProtocolError::NotEnabled(p));
    };
    Ok((state, tag))
}

/// Applies the enabled action of a single process.
pub fn apply<H: CsHandler>(
    g: &Graph,
    params: &ProtocolParams,
    conf: &Configuration,
    p: usize,
    handler: &H,
) -> Result<(Configuration, ActionTag), ProtocolError> {
    let (state, tag) = apply_one(g, params, conf, p, handler)?;
    let mut next = conf.clone();
    next.states[p] = state;
    Ok((next, tag))
}

/// One daemon transition: every chosen process executes its enabled action
/// against the pre-step configuration (simultaneous atomic reads).
pub fn step<H: CsHandler>(
    g: &Graph,
    params: &ProtocolParams,
    conf: &Configuration,
    chosen: &[usize],
    handler: &H,
) -> Result<(Configuration, Vec<EventRecord>), ProtocolError> {
    if chosen.is_empty() {
        return Err(ProtocolError::EmptyChoice);
    }
    let mut next = conf.clone();
    let mut events = Vec::with_capacity(chosen.len());
    for &p in chosen {
        let (state, tag) = apply_one(g, params, conf, p, handler)?;
        events.push(EventRecord {
            process: p,
            kind: tag.kind,
            cs: tag.cs,
            clock_before: conf.states[p].r,
            clock_after: state.r,
        });
        next.states[p] = state;
    }
    Ok((next, events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::families::{path, ring};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn params(g: &Graph, delta: i64) -> ProtocolParams {
        ProtocolParams::new(g, None, None, delta, 1).unwrap()
    }

    #[test]
    fn all_equal_clocks_enable_normal_everywhere() {
        let g = ring(4);
        let p = params(&g, 1);
        let conf = Configuration::uniform(4, 0);
        for i in 0..4 {
            let gs = guards(&g, &p, &conf, i);
            assert!(gs.normal && gs.locally_correct && !gs.convergence && !gs.reset);
        }
    }

    #[test]
    fn tail_minimum_enables_convergence() {
        let g = path(3);
        let p = params(&g, 1);
        let conf = Configuration::from_clocks(&[-1, -2, -1]);
        let gs = guards(&g, &p, &conf, 1);
        assert!(gs.convergence && !gs.normal && !gs.reset);
    }

    #[test]
    fn stab_gap_enables_reset() {
        let g = path(2);
        let p = ProtocolParams::new(&g, Some(6), None, 1, 1).unwrap();
        // Gap of 2 in stab: locally incorrect, so the reset guard opens.
        let conf = Configuration::from_clocks(&[3, 1]);
        let gs = guards(&g, &p, &conf, 0);
        assert!(!gs.locally_correct && gs.reset && !gs.normal);
    }

    #[test]
    fn apply_selects_cs_by_phase_position() {
        let g = path(2);
        let p = ProtocolParams::new(&g, Some(3), None, 3, 1).unwrap();

        struct Probe;
        impl CsHandler for Probe {
            fn cs1(&self, _: &Graph, _: &ProtocolParams, c: &Configuration, p: usize) -> Registers {
                let mut r = Registers::of(&c.states[p]);
                r.res = 1;
                r
            }
            fn cs2(&self, _: &Graph, _: &ProtocolParams, c: &Configuration, p: usize) -> Registers {
                let mut r = Registers::of(&c.states[p]);
                r.res = 2;
                r
            }
        }

        // r = 2 is the last slot of the phase: CS2 fires, clock moves to 3.
        let conf = Configuration::from_clocks(&[2, 2]);
        let (next, tag) = apply(&g, &p, &conf, 0, &Probe).unwrap();
        assert_eq!(tag.cs, Some(CsKind::Cs2));
        assert_eq!(next.states[0].r, 3);
        assert_eq!(next.states[0].res, 2);

        // r = 0 is mid-phase: CS1.
        let conf = Configuration::from_clocks(&[0, 0]);
        let (next, tag) = apply(&g, &p, &conf, 0, &Probe).unwrap();
        assert_eq!(tag.cs, Some(CsKind::Cs1));
        assert_eq!(next.states[0].r, 1);
        assert_eq!(next.states[0].res, 1);

        // Reset: no CS, clock to -alpha.
        let conf = Configuration::from_clocks(&[5, 1]);
        let (next, tag) = apply(&g, &p, &conf, 0, &Probe).unwrap();
        assert_eq!(tag.kind, ActionKind::Reset);
        assert_eq!(tag.cs, None);
        assert_eq!(next.states[0].r, -p.sys().alpha());
        assert_eq!(next.states[0].res, 0);
    }

    #[test]
    fn step_reads_pre_state() {
        let g = path(2);
        let p = params(&g, 1);
        let conf = Configuration::uniform(2, 0);
        let (next, events) = step(&g, &p, &conf, &[0, 1], &NoopCs).unwrap();
        assert_eq!(next.clocks(), vec![1, 1]);
        assert_eq!(events.len(), 2);

        // Singleton step changes only the chosen process.
        let (next, _) = step(&g, &p, &conf, &[1], &NoopCs).unwrap();
        assert_eq!(next.clocks(), vec![0, 1]);
    }

    #[test]
    fn simultaneous_step_matches_sequentialized_reachability() {
        // Two neighbors with equal clocks: the joint step gives the same
        // configuration as either sequential order reaches in two steps.
        let g = path(2);
        let p = params(&g, 1);
        let conf = Configuration::uniform(2, 3);
        let (joint, _) = step(&g, &p, &conf, &[0, 1], &NoopCs).unwrap();
        for order in [[0usize, 1], [1, 0]] {
            let mut c = conf.clone();
            for q in order {
                let (nc, _) = step(&g, &p, &c, &[q], &NoopCs).unwrap();
                c = nc;
            }
            assert_eq!(c, joint);
        }
    }

    #[test]
    fn relabeling_commutes_with_step() {
        // Anonymity: rotating a ring and rotating the schedule commute.
        let g = ring(5);
        let p = params(&g, 2);
        let rot = |i: usize| (i + 1) % 5;
        let clocks = [4, 5, 5, 4, 4];
        let conf = Configuration::from_clocks(&clocks);
        let mut rotated = clocks;
        for i in 0..5 {
            rotated[rot(i)] = clocks[i];
        }
        let conf_rot = Configuration::from_clocks(&rotated);
        for chosen in [vec![0], vec![0, 3], vec![3, 4]] {
            let (a, _) = step(&g, &p, &conf, &chosen, &NoopCs).unwrap();
            let chosen_rot: Vec<usize> = chosen.iter().map(|&i| rot(i)).collect();
            let (b, _) = step(&g, &p, &conf_rot, &chosen_rot, &NoopCs).unwrap();
            for i in 0..5 {
                assert_eq!(a.states[i].r, b.states[rot(i)].r);
            }
        }
    }

    fn random_conf(sys: &IncSystem, n: usize, rng: &mut impl Rng) -> Configuration {
        Configuration::from_clocks(
            &(0..n)
                .map(|_| rng.gen_range(-sys.alpha()..sys.period()))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn guard_exclusivity_over_random_configurations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for g in [ring(5), path(4), ring(6)] {
            let p = params(&g, 2);
            for _ in 0..500 {
                let conf = random_conf(p.sys(), g.n(), &mut rng);
                for i in 0..g.n() {
                    let gs = guards(&g, &p, &conf, i);
                    let fired =
                        [gs.normal, gs.convergence, gs.reset].iter().filter(|&&b| b).count();
                    assert!(fired <= 1, "guards overlap at {i}: {gs:?}");
                    if gs.normal {
                        assert!(gs.locally_correct);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn wu_closed_under_any_step(seed in 0u64..500) {
            let g = ring(5);
            let p = params(&g, 1);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Build a WU configuration: a base clock plus {0,1} offsets that
            // stay locally comparable around the ring.
            let base = rng.gen_range(0..p.sys().period());
            let offsets = [0, 0, 1, 1, 1];
            let clocks: Vec<i64> = offsets
                .iter()
                .map(|&o| (base + o).rem_euclid(p.sys().period()))
                .collect();
            let conf = Configuration::from_clocks(&clocks);
            prop_assume!(conf.is_wu(&g, &p));
            let enabled = enabled_processes(&g, &p, &conf);
            prop_assume!(!enabled.is_empty());
            // Any nonempty subset keeps WU.
            for mask in 1u32..(1 << enabled.len()) {
                let chosen: Vec<usize> = enabled
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &q)| q)
                    .collect();
                let (next, _) = step(&g, &p, &conf, &chosen, &NoopCs).unwrap();
                prop_assert!(next.is_wu(&g, &p));
            }
        }
    }
}
