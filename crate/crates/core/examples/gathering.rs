//! Gathering with one-axis agreement: time grows with the diameter, not with
//! the number of robots.

use maxline::{simulate, AlgorithmId, InitialSource, Point2, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    let pair = RunConfig::new(
        AlgorithmId::Gathering,
        SchedulerSpec::fsync(),
        InitialSource::Positions {
            points: vec![Point2::new(0.0, 0.0), Point2::new(0.0, 1.0)],
        },
    );
    let trace = simulate(&pair)?;
    println!("pair gathers at {:?} in {} round(s)", trace.final_positions()[0], trace.end.rounds);

    for delta in [4.0, 8.0, 16.0] {
        let cfg = RunConfig::new(
            AlgorithmId::Gathering,
            SchedulerSpec::fsync(),
            InitialSource::Spanning { n: 40, delta, seed: 2 },
        );
        let trace = simulate(&cfg)?;
        println!("diameter {delta:>4}: {:?} in {} epochs", trace.end.outcome, trace.end.epochs);
    }
    Ok(())
}
