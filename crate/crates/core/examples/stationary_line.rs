//! The luminous variant in which every robot eventually turns its lights off
//! and stops for good.

use maxline::{simulate, AlgorithmId, InitialSource, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    for n in [3, 6, 12, 24] {
        let cfg = RunConfig::new(
            AlgorithmId::MaxlineLumiFsyncStationary,
            SchedulerSpec::fsync(),
            InitialSource::Random { n, seed: 11 },
        );
        let trace = simulate(&cfg)?;
        let last = trace.records.last();
        let finished = last
            .and_then(|r| r.lights.as_ref())
            .map(|l| l.iter().filter(|s| s.fin).count())
            .unwrap_or(0);
        println!(
            "n={n:>2}: {:?} after {} rounds, {finished}/{n} robots finished",
            trace.end.outcome, trace.end.rounds
        );
    }
    Ok(())
}
