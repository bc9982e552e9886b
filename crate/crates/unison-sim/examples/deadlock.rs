//! Shows why the clock period must exceed the longest cycle: on a ring of 5
//! with period 5, a rotating configuration has no enabled process at all,
//! while the validated parameters make the same start converge.

use unison_sim::protocol::{Configuration, NoopCs, ProtocolParams};
use unison_sim::scheduler::{run, Daemon, DaemonKind, SchedulerError};
use unison_sim::topology::families::ring;

fn main() {
    let g = ring(5);
    let clocks = [0, 1, 2, 3, 4];

    // Period 5 on a 5-cycle: delta * K = C_G, outside the safe regime.
    let bad = ProtocolParams::unchecked(5, 5, 1, 1).unwrap();
    assert!(bad.validate_against(&g).is_err());
    let mut daemon = Daemon::new(DaemonKind::Synchronous, 0);
    match run(&g, &bad, Configuration::from_clocks(&clocks), &mut daemon, &NoopCs, 100, |_| false) {
        Err(SchedulerError::Deadlock { steps, .. }) => {
            println!("period 5: deadlock after {steps} steps from {clocks:?}");
        }
        other => panic!("expected deadlock, got {other:?}"),
    }

    // The constructor picks a period larger than the longest cycle.
    let good = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
    println!("validated period: {}", good.sys().period());
    let mut daemon = Daemon::new(DaemonKind::Synchronous, 0);
    let exec = run(
        &g,
        &good,
        Configuration::from_clocks(&clocks),
        &mut daemon,
        &NoopCs,
        10_000,
        |e| e.final_config().is_wu(&g, &good),
    )
    .unwrap();
    println!(
        "same start converges to unison in {} steps: {:?}",
        exec.len(),
        exec.final_config().clocks()
    );
}
