//! Acceptance run: every criterion at its pinned tolerance, one line each.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use maxline::analysis::{gaps_in_order, line_order, w_update_oracle, GapVector};
use maxline::fixtures::{c2, indistinguishable_from_line_end, make_fixture, stuck_check, FixtureKind};
use maxline::sim::{
    default_max_epochs, distinct_light_values, final_gaps, simulate, swarm_step, verify_trace, Check, Outcome, Trace,
    VerifyReport,
};
use maxline::{
    ActivationRecord, AlgorithmId, Chirality, GlobalConfiguration, InitialSource, Point2, RangeModel, RunConfig,
    SchedulerSpec,
};

const EPS: f64 = 0.01;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn run(cfg: &RunConfig) -> Trace {
    simulate(cfg).unwrap_or_else(|e| panic!("{} failed to run: {e}", cfg.algorithm))
}

fn random_cfg(algorithm: AlgorithmId, scheduler: SchedulerSpec, n: usize, seed: u64) -> RunConfig {
    RunConfig::new(algorithm, scheduler, InitialSource::Random { n, seed }).with_epsilon(EPS)
}

/// A fixed cyclic activation script of random small subsets.
fn adversary_script(n: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xadd);
    let cap = (n / 3).max(1);
    (0..n + 3)
        .map(|_| {
            let k = rng.random_range(1..=cap);
            let mut set: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect()
}

fn schedulers_for(algorithm: AlgorithmId, n: usize, seed: u64) -> Vec<(&'static str, SchedulerSpec)> {
    if algorithm.fsync_only() {
        return vec![("fsync", SchedulerSpec::fsync())];
    }
    vec![
        ("fsync", SchedulerSpec::fsync()),
        ("ssync-random", SchedulerSpec::ssync_random(0.5, seed)),
        ("ssync-roundrobin", SchedulerSpec::ssync_roundrobin(1 + (seed as usize) % n.max(1))),
        ("ssync-adversary", SchedulerSpec::ssync_adversary(adversary_script(n, seed))),
    ]
}

fn safety() -> Verdict {
    let mut cells = Vec::new();
    for algorithm in AlgorithmId::ALL {
        for seed in 0..50u64 {
            let n = 2 + (seed as usize) % 15;
            for (name, sched) in schedulers_for(algorithm, n, seed) {
                cells.push((algorithm, name, random_cfg(algorithm, sched, n, seed)));
            }
        }
    }
    let failures: Vec<String> = cells
        .par_iter()
        .filter_map(|(algorithm, name, cfg)| {
            let trace = run(cfg);
            let report = verify_trace(&trace, &[Check::Safety]).expect("replay");
            (!report.passed()).then(|| format!("{algorithm}/{name}: {}", report.violations[0]))
        })
        .collect();
    verdict(
        failures.is_empty(),
        format!(
            "{} runs, {} violations{}",
            cells.len(),
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

struct OblotRun {
    n: usize,
    trace: Trace,
    report: VerifyReport,
}

fn oblot_runs() -> Vec<OblotRun> {
    let cells: Vec<(usize, u64)> = (3..=16).flat_map(|n| (0..20).map(move |s| (n, s))).collect();
    cells
        .par_iter()
        .map(|&(n, seed)| {
            let trace = run(&random_cfg(AlgorithmId::MaxlineOblot, SchedulerSpec::ssync_random(0.5, seed), n, seed));
            let report = verify_trace(
                &trace,
                &[Check::Safety, Check::DropDecomposition, Check::SortedGapBound, Check::EpochRatio],
            )
            .expect("replay");
            OblotRun { n, trace, report }
        })
        .collect()
}

fn oblot_convergence(runs: &[OblotRun]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for r in runs {
        let budget = 20.0 * (r.n * r.n) as f64 * (r.n as f64 / EPS).ln();
        let ok = r.trace.end.outcome == Outcome::Converged && (r.trace.end.epochs as f64) <= budget;
        bad += usize::from(!ok);
        worst = worst.max(r.trace.end.epochs as f64 / budget);
    }
    verdict(
        bad == 0,
        format!("{}/{} converged within budget; worst epochs/budget = {worst:.4}", runs.len() - bad, runs.len()),
    )
}

fn epoch_bounds(runs: &[OblotRun]) -> Verdict {
    let mut sorted_viol = 0;
    let mut ratio_viol = 0;
    let mut epochs = 0;
    let mut worst_margin = f64::INFINITY;
    for r in runs {
        let e = r.report.epoch_checks.as_ref().expect("epoch checks ran");
        sorted_viol += e.sorted_bound_violations.len();
        ratio_viol += e.ratio_violations.len();
        epochs += e.rows.len();
        if let Some(m) = e.min_ratio {
            worst_margin = worst_margin.min(m / e.ratio_floor);
        }
    }
    verdict(
        sorted_viol == 0 && ratio_viol == 0,
        format!(
            "{epochs} collinear epochs; ratio violations {ratio_viol}, sorted-gap violations {sorted_viol}; min ratio/floor = {worst_margin:.2}"
        ),
    )
}

/// A collinear, connected configuration with random gaps and chiralities.
fn random_line(n: usize, rng: &mut ChaCha8Rng) -> GlobalConfiguration {
    let mut y = 0.0;
    let mut points = Vec::new();
    for _ in 0..n {
        points.push(Point2::new(0.0, y));
        y += rng.random_range(0.05..=1.0);
    }
    let chir: Vec<Chirality> = (0..n)
        .map(|_| if rng.random_bool(0.5) { Chirality::Positive } else { Chirality::Negative })
        .collect();
    GlobalConfiguration::new(&points, &chir, RangeModel::square(1.0)).expect("valid line")
}

fn drop_decomposition(runs: &[OblotRun]) -> Verdict {
    let mut checked = 0;
    let mut interior = 0;
    let mut violations = 0;
    let mut min_res = f64::INFINITY;
    let mut max_int: f64 = 0.0;
    for r in runs {
        let rc = r.report.round_checks.as_ref().expect("round checks ran");
        checked += rc.rounds_checked;
        interior += rc.interior_rounds;
        violations += rc.violations.len();
        min_res = min_res.min(rc.min_residual.unwrap_or(0.0));
        max_int = max_int.max(rc.max_interior_residual.unwrap_or(0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut oracle_cases = 0;
    let mut oracle_err: f64 = 0.0;
    for n in 2..=6usize {
        for _ in 0..8 {
            let config = random_line(n, &mut rng);
            let order = line_order(&config.positions());
            let before = gaps_in_order(&config.positions(), &order);
            for mask in 0u32..(1 << n) {
                let active: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let tau: Vec<bool> = order.iter().map(|id| active.contains(id)).collect();
                let next = swarm_step(AlgorithmId::MaxlineOblot, &config, &ActivationRecord::new(0, active))
                    .expect("step");
                let got = gaps_in_order(&next.positions(), &order);
                let want: GapVector = w_update_oracle(&before, &tau);
                for (a, b) in got.w.iter().zip(&want.w) {
                    oracle_err = oracle_err.max((a - b).abs());
                }
                oracle_cases += 1;
            }
        }
    }
    verdict(
        violations == 0 && oracle_err <= 1e-12,
        format!(
            "{checked} collinear rounds ({interior} without an active end), {violations} violations, min residual {min_res:.2e}, max |interior residual| {max_int:.2e}; oracle max error {oracle_err:.2e} over {oracle_cases} subsets"
        ),
    )
}

fn ratios_in(means: &[f64], lo: f64, hi: f64) -> (bool, Vec<f64>) {
    let r: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
    (r.iter().all(|x| (lo..=hi).contains(x)), r)
}

fn lumi_fsync() -> Verdict {
    let sizes = [4usize, 8, 16, 32, 64];
    let seeds = 20u64;
    let mut means = Vec::new();
    let mut exact = true;
    let mut max_lights = 0;
    for &n in &sizes {
        let traces: Vec<Trace> = (0..seeds)
            .into_par_iter()
            .map(|seed| run(&random_cfg(AlgorithmId::MaxlineLumiFsync, SchedulerSpec::fsync(), n, seed)))
            .collect();
        for t in &traces {
            let gaps = final_gaps(t).unwrap_or_default();
            exact &= t.end.outcome == Outcome::Converged
                && gaps.len() == n - 1
                && gaps.iter().all(|g| (g - 1.0).abs() <= 1e-9);
            max_lights = max_lights.max(distinct_light_values(t));
        }
        means.push(traces.iter().map(|t| t.end.rounds as f64).sum::<f64>() / seeds as f64);
    }
    let (ratios_ok, ratios) = ratios_in(&means, 1.5, 2.5);
    verdict(
        exact && ratios_ok && max_lights <= 9,
        format!(
            "exact={exact}; mean rounds {:?}; ratios {:?}; max distinct light values {max_lights}",
            means.iter().map(|m| (m * 10.0).round() / 10.0).collect::<Vec<_>>(),
            ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn gathering() -> Verdict {
    let n = 40;
    let seeds = 20u64;
    let mut means = Vec::new();
    let mut all = true;
    for delta in [4.0, 8.0, 16.0] {
        let traces: Vec<Trace> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                run(&RunConfig::new(
                    AlgorithmId::Gathering,
                    SchedulerSpec::fsync(),
                    InitialSource::Spanning { n, delta, seed },
                ))
            })
            .collect();
        all &= traces.iter().all(|t| t.end.outcome == Outcome::Converged);
        means.push(traces.iter().map(|t| t.end.epochs as f64).sum::<f64>() / seeds as f64);
    }
    let (ratios_ok, ratios) = ratios_in(&means, 1.5, 2.5);
    verdict(
        all && ratios_ok,
        format!(
            "all gathered={all}; mean epochs {means:?} for delta 4/8/16; ratios {:?}",
            ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn chain() -> Verdict {
    let cells: Vec<(usize, u64)> = [4usize, 8, 16].iter().flat_map(|&n| (0..20).map(move |s| (n, s))).collect();
    let results: Vec<(bool, usize, f64)> = cells
        .par_iter()
        .map(|&(n, seed)| {
            let t = run(&random_cfg(AlgorithmId::ChainGtm, SchedulerSpec::ssync_random(0.5, seed), n, seed));
            let budget = default_max_epochs(AlgorithmId::ChainGtm, &t.header.initial, EPS);
            let rep = verify_trace(&t, &[Check::Safety, Check::ChainPotential]).expect("replay");
            let margin = rep
                .min_chain_ratio
                .map(|m| m[0].min(m[1]) / rep.chain_ratio_floor.unwrap_or(1.0))
                .unwrap_or(f64::INFINITY);
            (
                t.end.outcome == Outcome::Converged && t.end.epochs as u64 <= budget,
                rep.violations.len(),
                margin,
            )
        })
        .collect();
    let converged = results.iter().filter(|r| r.0).count();
    let violations: usize = results.iter().map(|r| r.1).sum();
    let margin = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    verdict(
        converged == results.len() && violations == 0,
        format!("{converged}/{} converged; {violations} violations; min ratio/floor = {margin:.2}", results.len()),
    )
}

fn impossibility() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    let c2cfg = make_fixture(FixtureKind::C2, 1.0).expect("fixture");
    let circ = RangeModel::circular(1.0);
    let report = stuck_check(&c2cfg, &circ, 21).expect("connected");
    let stuck = c2::STUCK.iter().all(|&i| report.robot(i).is_stuck());
    let ends = c2::LINE_ENDS
        .iter()
        .all(|&i| indistinguishable_from_line_end(&c2cfg, i, circ, 1.0).expect("valid"));
    let global: usize = c2::STUCK.iter().map(|&i| report.robot(i).preserving.len()).sum();
    ok &= stuck && ends;
    notes.push(format!(
        "C2 circular: every nonzero probe drops a neighbor={stuck} ({global} boundary probes keep the whole graph connected), ends indistinguishable={ends}"
    ));

    let square = stuck_check(&c2cfg, &RangeModel::square(1.0), 21).expect("connected");
    let free = square.robot(c2::LEFT_MID).free_rightwards(&square.grid, 1.0);
    ok &= free;
    notes.push(format!("C2 square: rightward freedom={free}"));

    let alpha = make_fixture(FixtureKind::Alpha(2.0), 1.0).expect("fixture");
    let areport = stuck_check(&alpha, &circ, 21).expect("connected");
    let a_stuck = (4..alpha.n()).all(|i| areport.robot(i).is_stuck());
    let a_ends = (0..4).all(|i| {
        indistinguishable_from_line_end(&alpha, i, RangeModel::circular(2.0), 1.0).expect("valid")
    });
    ok &= alpha.n() == 12 && a_stuck && a_ends;
    notes.push(format!("alpha(2): {} robots, stuck={a_stuck}, ends indistinguishable={a_ends}", alpha.n()));
    verdict(ok, notes.join("; "))
}

fn lumi_ssync() -> Verdict {
    let cells: Vec<(usize, u64)> = (3..=12).flat_map(|n| (0..20).map(move |s| (n, s))).collect();
    let results: Vec<(bool, f64)> = cells
        .par_iter()
        .map(|&(n, seed)| {
            let t = run(&random_cfg(AlgorithmId::MaxlineLumiSsync, SchedulerSpec::ssync_random(0.5, seed), n, seed));
            let safe = verify_trace(&t, &[Check::Safety]).expect("replay").passed();
            let budget = 40 * n * n;
            let exact = final_gaps(&t).is_some_and(|g| g.iter().all(|w| (w - 1.0).abs() <= 1e-9));
            (
                safe && exact && t.end.outcome == Outcome::Converged && t.end.epochs <= budget,
                t.end.epochs as f64 / budget as f64,
            )
        })
        .collect();
    let good = results.iter().filter(|r| r.0).count();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    verdict(
        good == results.len(),
        format!("{good}/{} exact and safe within 40n^2 epochs; worst epochs/budget = {worst:.4}", results.len()),
    )
}

fn determinism() -> Verdict {
    let configs = vec![
        random_cfg(AlgorithmId::MaxlineOblot, SchedulerSpec::ssync_random(0.5, 7), 8, 7),
        random_cfg(AlgorithmId::MaxlineLumiFsync, SchedulerSpec::fsync(), 16, 3),
        random_cfg(AlgorithmId::MaxlineLumiFsyncStationary, SchedulerSpec::fsync(), 9, 4),
        random_cfg(AlgorithmId::MaxlineLumiSsync, SchedulerSpec::ssync_random(0.5, 5), 7, 5),
        random_cfg(AlgorithmId::ChainGtm, SchedulerSpec::ssync_random(0.5, 2), 8, 2),
        RunConfig::new(
            AlgorithmId::Gathering,
            SchedulerSpec::fsync(),
            InitialSource::Spanning { n: 40, delta: 8.0, seed: 1 },
        ),
        random_cfg(AlgorithmId::MaxlineLumiSsync, SchedulerSpec::ssync_adversary(adversary_script(6, 1)), 6, 1),
    ];
    let mut same = 0;
    for cfg in &configs {
        let a = run(cfg).to_jsonl();
        let b = run(cfg).to_jsonl();
        same += usize::from(a == b);
    }
    verdict(
        same == configs.len(),
        format!("{same}/{} re-runs byte-identical", configs.len()),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() -> ExitCode {
    let start = Instant::now();
    let oblot = oblot_runs();
    let criteria: Vec<Criterion> = vec![
        ("safety invariants", Box::new(safety)),
        ("oblot convergence", Box::new(|| oblot_convergence(&oblot))),
        ("per-epoch decrease bounds", Box::new(|| epoch_bounds(&oblot))),
        ("per-round decomposition", Box::new(|| drop_decomposition(&oblot))),
        ("lumi fsync exactness and linearity", Box::new(lumi_fsync)),
        ("gathering", Box::new(gathering)),
        ("chain go-to-the-middle", Box::new(chain)),
        ("impossibility witnesses", Box::new(impossibility)),
        ("lumi ssync", Box::new(lumi_ssync)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.pass);
        println!("{} [{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
