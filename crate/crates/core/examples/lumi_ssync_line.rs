//! The luminous protocol for semi-synchronous schedulers, run under each
//! scheduler family.

use maxline::{simulate, AlgorithmId, InitialSource, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    let n = 10;
    let schedulers = [
        ("fsync", SchedulerSpec::fsync()),
        ("ssync-random:0.5", SchedulerSpec::ssync_random(0.5, 3)),
        ("ssync-roundrobin:3", SchedulerSpec::ssync_roundrobin(3)),
    ];
    for (name, spec) in schedulers {
        let cfg = RunConfig::new(AlgorithmId::MaxlineLumiSsync, spec, InitialSource::Random { n, seed: 3 });
        let trace = simulate(&cfg)?;
        println!(
            "{name:<20} {:?}: {} rounds, {} epochs",
            trace.end.outcome, trace.end.rounds, trace.end.epochs
        );
    }
    Ok(())
}
