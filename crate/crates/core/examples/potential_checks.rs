//! The gap potential and its per-round and per-epoch decrease bounds, first
//! on a hand-made gap vector, then over a recorded run.

use maxline::analysis::{drop_terms, phi, phi_drop_bound_check, sorted_gap_bound, w_update_oracle, GapVector};
use maxline::sim::{verify_trace, Check};
use maxline::{simulate, AlgorithmId, InitialSource, RunConfig, SchedulerSpec};

fn main() -> maxline::Result<()> {
    let g = GapVector::from_gaps(&[0.2, 0.5, 0.9, 0.4]);
    println!("gaps {:?}: potential {:.4}, sorted bound {:.4}", g.gaps(), phi(&g), sorted_gap_bound(&g));

    // Interior robots only, so the decrease equals the bound exactly.
    let tau = [false, true, true, false, false];
    let after = w_update_oracle(&g, &tau);
    let check = phi_drop_bound_check(&g, &tau, &after)?;
    println!(
        "interior round: drop {:.6}, bound {:.6}, terms total {:.6}",
        check.drop,
        check.bound,
        drop_terms(&g, &tau).total()
    );
    let tau = [true, false, true, false, true];
    let check = phi_drop_bound_check(&g, &tau, &w_update_oracle(&g, &tau))?;
    println!("with line ends: drop {:.6} >= bound {:.6}: {}", check.drop, check.bound, check.holds());

    let cfg = RunConfig::new(
        AlgorithmId::MaxlineOblot,
        SchedulerSpec::ssync_random(0.5, 1),
        InitialSource::Random { n: 8, seed: 1 },
    );
    let trace = simulate(&cfg)?;
    let report = verify_trace(&trace, &[Check::DropDecomposition, Check::SortedGapBound, Check::EpochRatio])?;
    let epochs = report.epoch_checks.as_ref();
    println!(
        "\nrecorded run: {} violations, epoch floor {:.2e}, min ratio {:?}",
        report.violations.len(),
        epochs.map(|e| e.ratio_floor).unwrap_or_default(),
        epochs.and_then(|e| e.min_ratio)
    );
    if let Some(rounds) = &report.round_checks {
        println!("round checks: {rounds:?}");
    }
    Ok(())
}
