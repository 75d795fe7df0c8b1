//! Oblivious robots forming a maximal vertical line under a random
//! semi-synchronous scheduler.

use maxline::analysis::line_metrics;
use maxline::sim::final_gaps;
use maxline::{simulate, AlgorithmId, GlobalConfiguration, InitialSource, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    let n = 8;
    let cfg = RunConfig::new(
        AlgorithmId::MaxlineOblot,
        SchedulerSpec::ssync_random(0.5, 1),
        InitialSource::Random { n, seed: 1 },
    )
    .with_epsilon(0.01);
    let trace = simulate(&cfg)?;
    println!(
        "n={n}: {:?} after {} rounds, {} epochs (budget {})",
        trace.end.outcome, trace.end.rounds, trace.end.epochs, trace.header.max_epochs
    );

    let last = GlobalConfiguration::with_uniform_chirality(&trace.final_positions(), cfg.range())?;
    let m = line_metrics(&last, cfg.epsilon);
    println!("collinear {}, length {:.4} of {}", m.is_line, m.length, n - 1);
    if let Some(gaps) = final_gaps(&trace) {
        let shown: Vec<String> = gaps.iter().map(|g| format!("{g:.4}")).collect();
        println!("gaps: {}", shown.join(" "));
    }
    Ok(())
}
