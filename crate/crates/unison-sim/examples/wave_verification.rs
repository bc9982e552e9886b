//! Lifts a stabilized asynchronous execution to unbounded virtual clocks,
//! slices it into segments between cuts, and verifies the wavelet / wave /
//! strong-wave structure of each segment.

use std::collections::HashSet;

use unison_sim::causality::{
    cut_at, lift, segment_events, verify_strong_wave, verify_wave, verify_wavelet, CausalDag,
    EventId, DEFAULT_MAX_WORK,
};
use unison_sim::protocol::{Configuration, NoopCs, ProtocolParams};
use unison_sim::scheduler::{run, Daemon, DaemonKind};
use unison_sim::topology::families::grid;

fn main() {
    let g = grid(2, 3);
    let params = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
    let diameter = g.diameter();

    // Start legitimate and run long enough for several diameters of progress.
    let conf0 = Configuration::uniform(g.n(), 0);
    let mut daemon = Daemon::new(DaemonKind::RandomSubset { bias: 0.4 }, 7);
    let exec = run(&g, &params, conf0, &mut daemon, &NoopCs, 5_000, |e| {
        e.steps.len() >= 40 * g.n()
    })
    .unwrap();

    let dag = CausalDag::build(&g, &exec);
    let lifted = lift(&g, &params, &exec, &dag).unwrap();
    println!(
        "{} events, anchor process {}, lifting base {}",
        dag.len(),
        lifted.anchor,
        lifted.base
    );

    for span in [1, diameter, diameter + 2, 2 * diameter + 2] {
        let k1 = lifted.base;
        let k2 = lifted.base + span as i64;
        let c1 = cut_at(&dag, &lifted, k1).unwrap();
        let c2 = cut_at(&dag, &lifted, k2).unwrap();
        let segment: HashSet<EventId> =
            segment_events(&dag, &c1, &c2).unwrap().into_iter().collect();
        let decide: HashSet<EventId> = c2.events.iter().copied().collect();

        let wavelet = verify_wavelet(&g, &dag, &segment, &decide, span.min(diameter));
        let wave = verify_wave(&g, &dag, &segment, &decide);
        let strong =
            verify_strong_wave(&g, &dag, &segment, &decide, DEFAULT_MAX_WORK).unwrap();
        println!(
            "segment of {span} virtual ticks (diameter {diameter}): \
             wavelet={wavelet} wave={wave} strong_wave={strong}"
        );
    }
}
