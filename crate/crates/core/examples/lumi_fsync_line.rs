//! Luminous robots solving the line exactly in a linear number of rounds
//! under the fully synchronous scheduler.

use maxline::sim::{distinct_light_values, final_gaps};
use maxline::{simulate, AlgorithmId, InitialSource, Point2, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    // Two robots: one move each and they sit one unit apart.
    let pair = RunConfig::new(
        AlgorithmId::MaxlineLumiFsync,
        SchedulerSpec::fsync(),
        InitialSource::Positions {
            points: vec![Point2::new(0.0, 0.0), Point2::new(0.4, 0.3)],
        },
    );
    let trace = simulate(&pair)?;
    println!("pair: {:?}, final {:?}", trace.end.outcome, trace.final_positions());

    for n in [4, 8, 16, 32, 64] {
        let cfg = RunConfig::new(
            AlgorithmId::MaxlineLumiFsync,
            SchedulerSpec::fsync(),
            InitialSource::Random { n, seed: 7 },
        );
        let trace = simulate(&cfg)?;
        let worst = final_gaps(&trace)
            .unwrap_or_default()
            .iter()
            .fold(0.0f64, |m, g| m.max((g - 1.0).abs()));
        println!(
            "n={n:>2}: {:?} in {:>3} rounds, max |gap-1| {worst:.1e}, {} light values",
            trace.end.outcome,
            trace.end.rounds,
            distinct_light_values(&trace)
        );
    }
    Ok(())
}
