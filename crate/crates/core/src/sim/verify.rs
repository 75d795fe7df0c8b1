use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{simulate_from, AlgorithmId, InitialState, Outcome, Trace};
use crate::analysis::{
    epoch_bound_checks, gaps_in_order, is_collinear, line_order, phi_drop_bound_check, EpochReport,
    EpochSample, CHECK_TOL,
};
use crate::chain::{links_connected, phi2, Axis, ChainConfiguration};
use crate::error::{Error, Result};
use crate::geometry::{self, coincident_pairs, Point2};

/// Checks that `verify` can run over a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Connectivity, collisions and light exclusion on every round.
    Safety,
    /// Per-round decrease of the gap potential against the drop terms.
    DropDecomposition,
    /// Per-epoch decrease against the sorted-gap bound.
    SortedGapBound,
    /// Per-epoch relative decrease of at least `1/(8n²)`.
    EpochRatio,
    /// Per-epoch relative decrease of the chain potential on both axes.
    ChainPotential,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Safety,
        Check::DropDecomposition,
        Check::SortedGapBound,
        Check::EpochRatio,
        Check::ChainPotential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Safety => "safety",
            Check::DropDecomposition => "drop-decomposition",
            Check::SortedGapBound => "sorted-gap-bound",
            Check::EpochRatio => "epoch-ratio",
            Check::ChainPotential => "chain-potential",
        }
    }

    pub fn applies_to(self, algorithm: AlgorithmId) -> bool {
        match self {
            Check::Safety => true,
            Check::DropDecomposition | Check::SortedGapBound | Check::EpochRatio => {
                algorithm == AlgorithmId::MaxlineOblot
            }
            Check::ChainPotential => algorithm == AlgorithmId::ChainGtm,
        }
    }
}

impl std::str::FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check `{s}`")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundCheckSummary {
    pub rounds_checked: usize,
    /// Rounds in which no line end was active.
    pub interior_rounds: usize,
    pub min_residual: Option<f64>,
    pub max_interior_residual: Option<f64>,
    pub violations: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainEpochRow {
    pub epoch: usize,
    pub round: u64,
    pub phi2: [f64; 2],
    pub ratio: [Option<f64>; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub algorithm: AlgorithmId,
    pub n: usize,
    pub outcome: Outcome,
    pub rounds: u64,
    pub epochs: usize,
    pub checks: Vec<Check>,
    pub violations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_checks: Option<RoundCheckSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch_checks: Option<EpochReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain_epochs: Vec<ChainEpochRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_ratio_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_chain_ratio: Option<[f64; 2]>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Per-epoch series as CSV.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        if self.algorithm == AlgorithmId::ChainGtm {
            w.write_record(["epoch", "round", "phi2_x", "phi2_y", "ratio_x", "ratio_y"])?;
            for r in &self.chain_epochs {
                w.write_record([
                    r.epoch.to_string(),
                    r.round.to_string(),
                    r.phi2[0].to_string(),
                    r.phi2[1].to_string(),
                    opt(r.ratio[0]),
                    opt(r.ratio[1]),
                ])?;
            }
        } else {
            w.write_record(["epoch", "round", "phi", "drop", "sorted_bound", "ratio"])?;
            for r in self.epoch_checks.iter().flat_map(|e| &e.rows) {
                w.write_record([
                    r.epoch.to_string(),
                    r.round.to_string(),
                    r.phi.to_string(),
                    r.drop.to_string(),
                    r.sorted_bound.to_string(),
                    opt(r.ratio),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Re-simulates the trace from its header and fails on the first record
/// that differs.
pub fn replay(trace: &Trace) -> Result<()> {
    let fresh = simulate_from(&trace.header.config, trace.header.initial.clone())?;
    if fresh.header != trace.header {
        return Err(Error::ReplayMismatch(0));
    }
    for (i, got) in trace.records.iter().enumerate() {
        match fresh.records.get(i) {
            Some(expected) if serde_json::to_string(expected)? == serde_json::to_string(got)? => {}
            _ => return Err(Error::ReplayMismatch(got.round)),
        }
    }
    if fresh.records.len() != trace.records.len() || fresh.end != trace.end {
        return Err(Error::ReplayMismatch(trace.records.len() as u64));
    }
    Ok(())
}

pub fn verify_file(path: &Path, checks: &[Check]) -> Result<VerifyReport> {
    verify_trace(&Trace::load(path)?, checks)
}

/// Replays the trace, then runs `checks` (every applicable check if empty).
pub fn verify_trace(trace: &Trace, checks: &[Check]) -> Result<VerifyReport> {
    replay(trace)?;
    let algorithm = trace.header.config.algorithm;
    let checks: Vec<Check> = if checks.is_empty() {
        Check::ALL.into_iter().filter(|c| c.applies_to(algorithm)).collect()
    } else {
        checks.to_vec()
    };
    let mut report = VerifyReport {
        algorithm,
        n: trace.header.initial.n(),
        outcome: trace.end.outcome,
        rounds: trace.end.rounds,
        epochs: trace.end.epochs,
        checks: checks.clone(),
        violations: Vec::new(),
        round_checks: None,
        epoch_checks: None,
        chain_epochs: Vec::new(),
        chain_ratio_floor: None,
        min_chain_ratio: None,
    };
    if trace.end.outcome == Outcome::InvariantViolation {
        report.violations.push(
            trace
                .end
                .diagnostic
                .clone()
                .unwrap_or_else(|| "run aborted on an invariant violation".into()),
        );
    }
    for check in checks {
        if !check.applies_to(algorithm) {
            report
                .violations
                .push(format!("check {} does not apply to {algorithm}", check.name()));
            continue;
        }
        match check {
            Check::Safety => safety(trace, &mut report),
            Check::DropDecomposition => {
                let summary = drop_decomposition(trace);
                for &r in &summary.violations {
                    report.violations.push(format!("round {r}: drop below the decomposition bound"));
                }
                report.round_checks = Some(summary);
            }
            Check::SortedGapBound | Check::EpochRatio => {
                if report.epoch_checks.is_none() {
                    report.epoch_checks = Some(epoch_bound_checks(&collinear_samples(trace), trace.header.config.epsilon)?);
                }
                let e = report.epoch_checks.as_ref().expect("just computed");
                let (list, what) = if check == Check::SortedGapBound {
                    (&e.sorted_bound_violations, "sorted-gap bound")
                } else {
                    (&e.ratio_violations, "relative drop floor")
                };
                for ep in list {
                    report.violations.push(format!("epoch {ep}: {what} violated"));
                }
            }
            Check::ChainPotential => chain_potential(trace, &mut report)?,
        }
    }
    Ok(report)
}

fn safety(trace: &Trace, report: &mut VerifyReport) {
    let algorithm = trace.header.config.algorithm;
    match &trace.header.initial {
        InitialState::Swarm { configuration } => {
            let range = configuration.range;
            for r in &trace.records {
                let pts = r.points();
                if !geometry::is_connected(&geometry::neighbors(&pts, &range)) {
                    report.violations.push(format!("round {}: disconnected", r.round));
                }
                if algorithm.is_maxline() && !coincident_pairs(&pts).is_empty() {
                    report.violations.push(format!("round {}: collision", r.round));
                }
                if let Some(lights) = &r.lights {
                    if lights.iter().any(|l| l.mov && l.prev) {
                        report.violations.push(format!("round {}: mov and prev both set", r.round));
                    }
                }
            }
        }
        InitialState::Chain { chain } => {
            for r in &trace.records {
                let mut c = chain.clone();
                c.positions = r.points();
                if !links_connected(&c) {
                    report.violations.push(format!("round {}: chain link longer than 1", r.round));
                }
            }
        }
    }
}

fn drop_decomposition(trace: &Trace) -> RoundCheckSummary {
    let mut summary = RoundCheckSummary::default();
    let mut before = trace.header.initial.positions();
    for r in &trace.records {
        let after = r.points();
        if is_collinear(&before) && is_collinear(&after) {
            let order = line_order(&before);
            if line_order(&after) == order {
                let mut tau = vec![false; order.len()];
                for (k, &id) in order.iter().enumerate() {
                    tau[k] = r.active.binary_search(&id).is_ok();
                }
                summary.rounds_checked += 1;
                match phi_drop_bound_check(&gaps_in_order(&before, &order), &tau, &gaps_in_order(&after, &order)) {
                    Ok(check) => {
                        summary.min_residual = Some(summary.min_residual.map_or(check.residual, |m| m.min(check.residual)));
                        if !check.endpoint_active {
                            summary.interior_rounds += 1;
                            let a = check.residual.abs();
                            summary.max_interior_residual = Some(summary.max_interior_residual.map_or(a, |m| m.max(a)));
                        }
                        if !check.holds() {
                            summary.violations.push(r.round);
                        }
                    }
                    Err(_) => summary.violations.push(r.round),
                }
            } else {
                summary.violations.push(r.round);
            }
        }
        before = after;
    }
    summary
}

/// Epoch-start samples from the first collinear one onward.
fn collinear_samples(trace: &Trace) -> Vec<EpochSample> {
    let samples = epoch_samples(trace);
    let first = samples.iter().position(|s| is_collinear(&s.positions)).unwrap_or(samples.len());
    samples[first..].to_vec()
}

fn epoch_samples(trace: &Trace) -> Vec<EpochSample> {
    trace
        .end
        .epoch_starts
        .iter()
        .enumerate()
        .filter_map(|(epoch, &round)| {
            trace.positions_at(round).map(|positions| EpochSample {
                epoch,
                round,
                positions,
            })
        })
        .collect()
}

fn chain_potential(trace: &Trace, report: &mut VerifyReport) -> Result<()> {
    let InitialState::Chain { chain } = &trace.header.initial else {
        return Err(Error::InvalidParameter("chain potential needs a chain trace".into()));
    };
    let n = chain.n();
    let floor = 1.0 / (4.0 * ((n + 1) * (n + 1)) as f64);
    report.chain_ratio_floor = Some(floor);
    let values: Vec<(usize, u64, [f64; 2])> = epoch_samples(trace)
        .into_iter()
        .map(|s| {
            let c = with_positions(chain, s.positions);
            (s.epoch, s.round, [phi2(&c, Axis::X), phi2(&c, Axis::Y)])
        })
        .collect();
    let mut min_ratio: Option<[f64; 2]> = None;
    for (k, &(epoch, round, p)) in values.iter().enumerate() {
        let mut ratio = [None, None];
        if let Some(&(_, _, next)) = values.get(k + 1) {
            for a in 0..2 {
                if p[a] > 1e-12 {
                    let r = (p[a] - next[a]) / p[a];
                    ratio[a] = Some(r);
                    if r < floor - CHECK_TOL {
                        report
                            .violations
                            .push(format!("epoch {epoch}: chain potential ratio {r} on axis {a}"));
                    }
                    let m = min_ratio.get_or_insert([f64::INFINITY; 2]);
                    m[a] = m[a].min(r);
                }
            }
        }
        report.chain_epochs.push(ChainEpochRow {
            epoch,
            round,
            phi2: p,
            ratio,
        });
    }
    report.min_chain_ratio = min_ratio;
    Ok(())
}

fn with_positions(chain: &ChainConfiguration, positions: Vec<Point2>) -> ChainConfiguration {
    ChainConfiguration {
        positions,
        frames: chain.frames.clone(),
        round: chain.round,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduler::SchedulerSpec;
    use crate::sim::{simulate, InitialSource, RunConfig};

    #[test]
    fn optimal_line_has_no_violations() {
        let points = (0..4).map(|i| Point2::new(0.0, i as f64)).collect();
        let cfg = RunConfig::new(
            AlgorithmId::MaxlineOblot,
            SchedulerSpec::fsync(),
            InitialSource::Positions { points },
        );
        let trace = simulate(&cfg).unwrap();
        assert_eq!(trace.end.rounds, 0);
        let report = verify_trace(&trace, &[]).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn tampered_position_is_detected() {
        let cfg = RunConfig::new(
            AlgorithmId::MaxlineOblot,
            SchedulerSpec::ssync_random(0.5, 4),
            InitialSource::Random { n: 5, seed: 4 },
        );
        let mut trace = simulate(&cfg).unwrap();
        assert!(trace.records.len() > 3);
        trace.records[2].positions[1][0] += 1e-6;
        assert!(matches!(verify_trace(&trace, &[]), Err(Error::ReplayMismatch(2))));
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
    }
}
