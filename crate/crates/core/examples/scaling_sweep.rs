//! Parallel sweeps with fitted log-log exponents: linear in n for the
//! luminous line, linear in the diameter for gathering.

use maxline::sim::{sweep, SweepAxis, SweepSpec};
use maxline::{AlgorithmId, SchedulerSpec};

fn main() -> maxline::Result<()> {
    let line = SweepSpec {
        algorithm: AlgorithmId::MaxlineLumiFsync,
        scheduler: SchedulerSpec::fsync(),
        axis: SweepAxis::N { values: vec![4, 8, 16, 32, 64] },
        seeds: (0..10).collect(),
        epsilon: 0.01,
        max_epochs: None,
        trace_dir: None,
    };
    let gather = SweepSpec {
        algorithm: AlgorithmId::Gathering,
        axis: SweepAxis::Delta { n: 40, values: vec![4.0, 8.0, 16.0] },
        ..line.clone()
    };
    let oblot = SweepSpec {
        algorithm: AlgorithmId::MaxlineOblot,
        scheduler: SchedulerSpec::ssync_random(0.5, 0),
        axis: SweepAxis::N { values: vec![4, 8, 16] },
        ..line.clone()
    };
    for (name, spec) in [("lumi-fsync", line), ("gathering", gather), ("oblot", oblot)] {
        let summary = sweep(&spec)?;
        println!("{name}: all converged {}", summary.all_converged());
        for (param, rounds, epochs) in &summary.means {
            println!("  {param:>4}: rounds {rounds:>8.2}, epochs {epochs:>8.2}");
        }
        println!(
            "  exponents: rounds {:.3}, epochs {:.3}",
            summary.rounds_exponent.unwrap_or(f64::NAN),
            summary.epochs_exponent.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
