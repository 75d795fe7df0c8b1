//! Go-to-the-middle on a chain with fixed outer robots: links converge to
//! equal vectors, with the potential shrinking every epoch.

use maxline::chain::{phi2, random_chain, Axis, ChainMetrics};
use maxline::sim::{verify_trace, simulate_from, Check, InitialState};
use maxline::{AlgorithmId, InitialSource, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    let chain = random_chain(8, 5);
    println!(
        "start: max link {:.3}, potential x {:.4} y {:.4}",
        chain.max_link(),
        phi2(&chain, Axis::X),
        phi2(&chain, Axis::Y)
    );
    let cfg = RunConfig::new(
        AlgorithmId::ChainGtm,
        SchedulerSpec::ssync_random(0.5, 5),
        InitialSource::Random { n: 8, seed: 5 },
    )
    .with_epsilon(0.01);
    let trace = simulate_from(&cfg, InitialState::Chain { chain })?;
    println!("{:?} after {} epochs", trace.end.outcome, trace.end.epochs);

    let report = verify_trace(&trace, &[Check::Safety, Check::ChainPotential])?;
    println!(
        "violations {}, floor {:.2e}, min ratios {:?}",
        report.violations.len(),
        report.chain_ratio_floor.unwrap_or_default(),
        report.min_chain_ratio
    );
    if let InitialState::Chain { chain } = &trace.header.initial {
        println!("initial span {:.4}", ChainMetrics::of(chain).span);
    }
    Ok(())
}
