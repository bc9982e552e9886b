//! Weighted single-source shortest paths as an r-operator computation:
//! min-plus transfer functions on the edges, source input 0, everything else
//! unreachable. Each phase delivers the distance vector.

use std::collections::HashMap;

use unison_sim::aggregation::{
    expected_values, run_computation, RSystem, TaskKind, TaskSpec,
};
use unison_sim::protocol::{ProtocolParams, Value};
use unison_sim::scheduler::{Daemon, DaemonKind};
use unison_sim::topology::families::grid;

fn main() {
    let g = grid(2, 3);
    let weights = HashMap::from([
        ((0, 1), 4),
        ((1, 2), 1),
        ((0, 3), 1),
        ((3, 4), 1),
        ((4, 5), 1),
        ((1, 4), 2),
        ((2, 5), 7),
    ]);
    let system = RSystem::min_plus(&g, &weights);

    let mut inputs = vec![Value::MAX; g.n()];
    inputs[0] = 0; // source

    // Phases must cover the longest simple path plus the starting step.
    let lsp = g.longest_simple_path_length(12).unwrap();
    let params = ProtocolParams::new(&g, None, None, lsp as i64 + 1, 1).unwrap();
    let task = TaskSpec { kind: TaskKind::ROperator { system }, inputs };

    let mut daemon = Daemon::new(DaemonKind::RandomSubset { bias: 0.6 }, 11);
    let run =
        run_computation(&g, &params, &task, &vec![0; g.n()], &mut daemon, 2, 200_000, 12).unwrap();
    let want = expected_values(&g, &task, 12).unwrap();

    println!("weighted distances from process 0 on a 2x3 grid:");
    for phase in &run.phases {
        println!("  phase {:2}: {:?}", phase.phase, phase.values);
        assert_eq!(phase.values, want);
    }
    println!("oracle (simple-walk enumeration): {want:?}");
}
