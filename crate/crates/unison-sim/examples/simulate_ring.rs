//! Runs the protocol on a ring from a scrambled start and prints the clock
//! vector after each step until the system is in unison.

use unison_sim::protocol::{Configuration, NoopCs, ProtocolParams};
use unison_sim::scheduler::{run, Daemon, DaemonKind};
use unison_sim::topology::families::ring;

fn main() {
    let g = ring(6);
    let params = ProtocolParams::new(&g, None, None, 1, 1).unwrap();
    println!(
        "ring of {}, clock period {}, tail length {}",
        g.n(),
        params.sys().period(),
        params.sys().alpha()
    );

    let conf0 = Configuration::from_clocks(&[0, 4, 2, 6, 1, 3]);
    let mut daemon = Daemon::new(DaemonKind::RandomSubset { bias: 0.5 }, 42);
    let exec = run(&g, &params, conf0, &mut daemon, &NoopCs, 10_000, |e| {
        e.final_config().is_wu(&g, &params)
    })
    .unwrap();

    for t in 0..=exec.len() {
        let c = exec.config_at(t);
        println!(
            "t={t:3}  clocks={:?}{}",
            c.clocks(),
            if c.is_wu(&g, &params) { "  <- in unison" } else { "" }
        );
    }
    println!(
        "reached unison after {} steps / {} rounds",
        exec.len(),
        exec.round_ends.len()
    );
}
