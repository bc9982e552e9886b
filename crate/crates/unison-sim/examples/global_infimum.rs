//! Computes the global minimum and the global gcd of per-process inputs on
//! an anonymous ring: every phase of the stabilized wave stream delivers the
//! answer to every process.

use unison_sim::aggregation::{expected_values, run_computation, InfimumOp, TaskKind, TaskSpec};
use unison_sim::protocol::ProtocolParams;
use unison_sim::scheduler::{Daemon, DaemonKind};
use unison_sim::topology::families::ring;

fn main() {
    let g = ring(6);
    // Phases must outlast the diameter by one step.
    let delta = g.diameter() as i64 + 1;
    let params = ProtocolParams::new(&g, None, None, delta, 1).unwrap();

    for (label, op, inputs) in [
        ("min", InfimumOp::Min, vec![41, 17, 64, 23, 99, 58]),
        ("gcd", InfimumOp::Gcd, vec![84, 126, 210, 42, 168, 252]),
    ] {
        let task = TaskSpec { kind: TaskKind::GlobalInfimum { op }, inputs };
        let mut daemon = Daemon::new(DaemonKind::RandomSubset { bias: 0.5 }, 1);
        let run = run_computation(
            &g,
            &params,
            &task,
            &[0, 3, 1, 5, 2, 4], // scrambled clocks: stabilizes first
            &mut daemon,
            3,
            100_000,
            12,
        )
        .unwrap();
        let want = expected_values(&g, &task, 12).unwrap();
        println!("global {label}: inputs {:?}", task.inputs);
        for phase in &run.phases {
            println!(
                "  phase {:2}: results {:?} (oracle {:?}), {} normal actions, {} reads",
                phase.phase, phase.values, want, phase.na_events, phase.neighbor_reads
            );
            assert_eq!(phase.values, want);
        }
    }
}
