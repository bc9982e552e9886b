//! Convergence under different adversaries: runs the same scrambled start
//! under every daemon and compares steps and rounds until unison.

use unison_sim::protocol::{Configuration, NoopCs, ProtocolParams};
use unison_sim::scheduler::{run, Daemon, DaemonKind};
use unison_sim::topology::families::random_connected;

fn main() {
    let g = random_connected(8, 4);
    let params = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
    let clocks: Vec<i64> = vec![3, -2, 7, 0, -5, 1, 8, 2];

    let daemons = [
        ("synchronous", DaemonKind::Synchronous),
        ("random-subset 0.8", DaemonKind::RandomSubset { bias: 0.8 }),
        ("random-subset 0.2", DaemonKind::RandomSubset { bias: 0.2 }),
        ("single-min", DaemonKind::SingleMin),
        ("single-random", DaemonKind::SingleRandom),
    ];
    println!("random connected graph, n=8, start {clocks:?}");
    for (name, kind) in daemons {
        let mut daemon = Daemon::new(kind, 9);
        let exec = run(
            &g,
            &params,
            Configuration::from_clocks(&clocks),
            &mut daemon,
            &NoopCs,
            100_000,
            |e| e.final_config().is_wu(&g, &params),
        )
        .unwrap();
        assert!(exec.final_config().is_wu(&g, &params));
        println!(
            "  {name:18} {:5} steps, {:4} rounds",
            exec.len(),
            exec.round_ends.len()
        );
    }
}
