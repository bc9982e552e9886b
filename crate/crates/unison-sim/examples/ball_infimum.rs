//! Computes, at every process, the minimum input within a fixed radius. The
//! phase length equals the radius plus one; the sliding register window
//! keeps neighbor reads consistent under fully asynchronous scheduling.

use unison_sim::aggregation::{expected_values, run_computation, InfimumOp, TaskKind, TaskSpec};
use unison_sim::protocol::ProtocolParams;
use unison_sim::scheduler::{Daemon, DaemonKind};
use unison_sim::topology::families::grid;

fn main() {
    let g = grid(3, 3);
    let inputs = vec![9, 4, 7, 8, 1, 6, 5, 3, 2];
    for rho in [1usize, 2] {
        let params = ProtocolParams::new(&g, None, None, rho as i64 + 1, rho as i64).unwrap();
        let task = TaskSpec {
            kind: TaskKind::BallInfimum { op: InfimumOp::Min, rho },
            inputs: inputs.clone(),
        };
        let mut daemon = Daemon::new(DaemonKind::SingleRandom, 3);
        let run =
            run_computation(&g, &params, &task, &vec![0; g.n()], &mut daemon, 2, 200_000, 12)
                .unwrap();
        let want = expected_values(&g, &task, 12).unwrap();
        println!("radius {rho} minima on a 3x3 grid, inputs {inputs:?}:");
        for phase in &run.phases {
            println!("  phase {:2}: {:?}", phase.phase, phase.values);
            assert_eq!(phase.values, want);
        }
    }
}
