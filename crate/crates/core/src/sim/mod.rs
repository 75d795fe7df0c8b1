//! Run configuration, the round loop with its safety guards, and the
//! trace/verify/sweep plumbing built on it.

mod sweep;
mod trace;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use sweep::{fit_exponent, sweep, SweepAxis, SweepRow, SweepSpec, SweepSummary};
pub use trace::{InitialState, Outcome, RoundRecord, Trace, TraceEnd, TraceHeader, TRACE_VERSION};
pub use verify::{verify_file, verify_trace, Check, ChainEpochRow, RoundCheckSummary, VerifyReport};

use crate::analysis::{gaps_in_order, is_collinear, is_max_line, line_metrics, line_order, phi, CHECK_TOL};
use crate::chain::{gtm_step, links_connected, phi2, random_chain, Axis, ChainConfiguration, ChainMetrics};
use crate::error::{Error, Result};
use crate::fixtures::{make_fixture, random_connected, random_spanning, FixtureKind};
use crate::gathering::gathering_compute;
use crate::geometry::{coincident_pairs, diameter_stats, Point2, RangeModel, TAU_GEO};
use crate::line_formation::{
    lumi_fsync_compute, lumi_fsync_stationary_compute, lumi_ssync_compute, oblot_compute, ComputeResult,
};
use crate::scheduler::{ActivationRecord, EpochLedger, Scheduler, SchedulerSpec};
use crate::world::{apply_moves, take_snapshot, GlobalConfiguration, LightState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    MaxlineOblot,
    MaxlineLumiFsync,
    MaxlineLumiFsyncStationary,
    MaxlineLumiSsync,
    Gathering,
    ChainGtm,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::MaxlineOblot,
        AlgorithmId::MaxlineLumiFsync,
        AlgorithmId::MaxlineLumiFsyncStationary,
        AlgorithmId::MaxlineLumiSsync,
        AlgorithmId::Gathering,
        AlgorithmId::ChainGtm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::MaxlineOblot => "maxline-oblot",
            AlgorithmId::MaxlineLumiFsync => "maxline-lumi-fsync",
            AlgorithmId::MaxlineLumiFsyncStationary => "maxline-lumi-fsync-stationary",
            AlgorithmId::MaxlineLumiSsync => "maxline-lumi-ssync",
            AlgorithmId::Gathering => "gathering",
            AlgorithmId::ChainGtm => "chain-gtm",
        }
    }

    pub fn uses_lights(self) -> bool {
        matches!(
            self,
            AlgorithmId::MaxlineLumiFsync | AlgorithmId::MaxlineLumiFsyncStationary | AlgorithmId::MaxlineLumiSsync
        )
    }

    /// Algorithms that are only defined for fully synchronous rounds.
    pub fn fsync_only(self) -> bool {
        matches!(
            self,
            AlgorithmId::MaxlineLumiFsync | AlgorithmId::MaxlineLumiFsyncStationary | AlgorithmId::Gathering
        )
    }

    pub fn is_maxline(self) -> bool {
        !matches!(self, AlgorithmId::Gathering | AlgorithmId::ChainGtm)
    }

    pub fn default_range(self) -> RangeModel {
        match self {
            AlgorithmId::ChainGtm => RangeModel::circular(1.0),
            _ => RangeModel::square(1.0),
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

/// Where the starting configuration comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSource {
    Fixture { fixture: FixtureKind, scale: f64 },
    /// Seeded random connected start; a random chain for `chain-gtm`.
    Random { n: usize, seed: u64 },
    /// Seeded random start whose diameter is about `delta`.
    Spanning { n: usize, delta: f64, seed: u64 },
    /// A JSON configuration, or for `chain-gtm` a JSON list of points.
    File { path: PathBuf },
    /// Explicit positions with uniform chirality (chain positions for `chain-gtm`).
    Positions { points: Vec<Point2> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: AlgorithmId,
    pub scheduler: SchedulerSpec,
    pub initial: InitialSource,
    pub epsilon: f64,
    /// `None` picks the per-algorithm default budget.
    #[serde(default)]
    pub max_epochs: Option<u64>,
    /// Overrides the algorithm's natural range.
    #[serde(default)]
    pub range: Option<RangeModel>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing)]
    pub trace: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(algorithm: AlgorithmId, scheduler: SchedulerSpec, initial: InitialSource) -> Self {
        RunConfig {
            algorithm,
            scheduler,
            initial,
            epsilon: 0.01,
            max_epochs: None,
            range: None,
            checks: Vec::new(),
            trace: None,
        }
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn with_max_epochs(mut self, max_epochs: u64) -> Self {
        self.max_epochs = Some(max_epochs);
        self
    }

    pub fn range(&self) -> RangeModel {
        self.range.unwrap_or_else(|| self.algorithm.default_range())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.max_epochs == Some(0) {
            return Err(Error::InvalidParameter("max_epochs must be at least 1".into()));
        }
        if self.algorithm.fsync_only() && !self.scheduler.is_fsync() {
            return Err(Error::InvalidParameter(format!(
                "{} runs under fsync only",
                self.algorithm
            )));
        }
        Ok(())
    }

    /// Builds the concrete starting state.
    pub fn materialize(&self) -> Result<InitialState> {
        self.validate()?;
        let range = self.range();
        if self.algorithm == AlgorithmId::ChainGtm {
            let chain = match &self.initial {
                InitialSource::Random { n, seed } => random_chain(*n, *seed),
                InitialSource::Positions { points } => ChainConfiguration::new(points.clone())?,
                InitialSource::File { path } => {
                    let text = std::fs::read_to_string(path)?;
                    match serde_json::from_str::<ChainConfiguration>(&text) {
                        Ok(c) => c,
                        Err(_) => ChainConfiguration::new(serde_json::from_str(&text)?)?,
                    }
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "chain-gtm cannot start from {other:?}"
                    )))
                }
            };
            return Ok(InitialState::Chain { chain });
        }
        let mut configuration = match &self.initial {
            InitialSource::Fixture { fixture, scale } => make_fixture(*fixture, *scale)?,
            InitialSource::Random { n, seed } => random_connected(*n, range, *seed)?,
            InitialSource::Spanning { n, delta, seed } => random_spanning(*n, *delta, range, *seed)?,
            InitialSource::File { path } => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            InitialSource::Positions { points } => GlobalConfiguration::with_uniform_chirality(points, range)?,
        };
        configuration.range = range;
        configuration.validate_initial()?;
        Ok(InitialState::Swarm { configuration })
    }
}

/// Default epoch budget: generous multiples of each algorithm's bound.
pub fn default_max_epochs(algorithm: AlgorithmId, initial: &InitialState, eps: f64) -> u64 {
    let n = initial.n() as f64;
    let budget = match algorithm {
        AlgorithmId::MaxlineOblot => 20.0 * n * n * (n / eps).ln(),
        AlgorithmId::ChainGtm => 20.0 * (n + 1.0).powi(2) * ((n + 1.0) / eps).ln(),
        AlgorithmId::MaxlineLumiFsync => 20.0 * n,
        AlgorithmId::MaxlineLumiFsyncStationary => 40.0 * n,
        AlgorithmId::MaxlineLumiSsync => 40.0 * n * n,
        AlgorithmId::Gathering => {
            let d = diameter_stats(&initial.positions());
            20.0 * (d.delta_x + d.delta_y + n)
        }
    };
    (budget.ceil() as u64).max(1)
}

fn compute(algorithm: AlgorithmId, config: &GlobalConfiguration, id: usize) -> Result<ComputeResult> {
    let snap = take_snapshot(config, id)?;
    let own = config.robots[id].visible;
    Ok(match algorithm {
        AlgorithmId::MaxlineOblot => oblot_compute(&snap),
        AlgorithmId::MaxlineLumiFsync => lumi_fsync_compute(&snap, own),
        AlgorithmId::MaxlineLumiFsyncStationary => lumi_fsync_stationary_compute(&snap, own),
        AlgorithmId::MaxlineLumiSsync => lumi_ssync_compute(&snap, own),
        AlgorithmId::Gathering => gathering_compute(&snap),
        AlgorithmId::ChainGtm => unreachable!("chain runs have no swarm snapshot"),
    })
}

/// Executes one round on a swarm configuration.
pub fn swarm_step(
    algorithm: AlgorithmId,
    config: &GlobalConfiguration,
    active: &ActivationRecord,
) -> Result<GlobalConfiguration> {
    let mut staged = config.clone();
    let mut targets = BTreeMap::new();
    for &id in &active.active {
        let res = compute(algorithm, config, id)?;
        targets.insert(id, config.robots[id].to_global(res.target));
        staged.set_pending(id, res.lights)?;
    }
    apply_moves(&staged, &targets, active)
}

fn swarm_converged(algorithm: AlgorithmId, config: &GlobalConfiguration, eps: f64) -> bool {
    match algorithm {
        AlgorithmId::MaxlineOblot => line_metrics(config, eps).approx,
        AlgorithmId::MaxlineLumiFsync | AlgorithmId::MaxlineLumiSsync => is_max_line(config, CHECK_TOL),
        AlgorithmId::MaxlineLumiFsyncStationary => {
            is_max_line(config, CHECK_TOL) && (config.n() < 2 || config.robots.iter().all(|r| r.visible.fin))
        }
        AlgorithmId::Gathering => {
            let p0 = config.robots[0].position;
            config.robots.iter().all(|r| (r.position - p0).chebyshev() <= TAU_GEO)
        }
        AlgorithmId::ChainGtm => unreachable!(),
    }
}

/// Safety violations after a round, as a diagnostic.
pub fn swarm_guard(algorithm: AlgorithmId, config: &GlobalConfiguration, collisions: &[(usize, usize)]) -> Option<String> {
    let round = config.round;
    let graph = config.graph();
    let components = graph.components();
    if components.len() > 1 {
        return Some(format!(
            "round {round}: disconnected into components {:?}",
            components
        ));
    }
    if algorithm.is_maxline() && !collisions.is_empty() {
        return Some(format!("round {round}: robots collided {collisions:?}"));
    }
    if algorithm.uses_lights() {
        let bad: Vec<usize> = config
            .robots
            .iter()
            .filter(|r| r.visible.mov && r.visible.prev)
            .map(|r| r.id)
            .collect();
        if !bad.is_empty() {
            return Some(format!("round {round}: mov and prev both set on robots {bad:?}"));
        }
    }
    None
}

fn pack(points: &[Point2]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x, p.y]).collect()
}

fn swarm_record(
    algorithm: AlgorithmId,
    config: &GlobalConfiguration,
    active: &ActivationRecord,
    epoch: usize,
    eps: f64,
) -> RoundRecord {
    let positions = config.positions();
    let collisions = coincident_pairs(&positions);
    let (phi_value, line) = if algorithm.is_maxline() {
        let phi_value = is_collinear(&positions).then(|| phi(&gaps_in_order(&positions, &line_order(&positions))));
        (phi_value, Some(line_metrics(config, eps)))
    } else {
        (None, None)
    };
    RoundRecord {
        round: active.round,
        epoch,
        active: active.active.clone(),
        positions: pack(&positions),
        lights: algorithm.uses_lights().then(|| config.lights()),
        collisions,
        phi: phi_value,
        phi2: None,
        line,
    }
}

/// Runs `config` from its source.
pub fn simulate(config: &RunConfig) -> Result<Trace> {
    let initial = config.materialize()?;
    simulate_from(config, initial)
}

/// Runs `config` from an explicit starting state.
pub fn simulate_from(config: &RunConfig, initial: InitialState) -> Result<Trace> {
    config.validate()?;
    let eps = config.epsilon;
    let n = initial.n();
    let max_epochs = config
        .max_epochs
        .unwrap_or_else(|| default_max_epochs(config.algorithm, &initial, eps));
    let header = TraceHeader {
        version: TRACE_VERSION,
        config: config.clone(),
        max_epochs,
        fairness_bound: config.scheduler.effective_fairness(n),
        initial: initial.clone(),
    };
    let mut records = Vec::new();
    let mut ledger = EpochLedger::new(n);
    let mut diagnostic = None;
    let outcome = match initial {
        InitialState::Swarm { configuration } => {
            if configuration.n() == 0 {
                return Err(Error::InvalidParameter("a run needs at least one robot".into()));
            }
            let mut scheduler = Scheduler::new(config.scheduler.clone(), n)?;
            let mut state = configuration;
            loop {
                if swarm_converged(config.algorithm, &state, eps) {
                    break Outcome::Converged;
                }
                if ledger.completed() as u64 >= max_epochs {
                    break Outcome::BudgetExhausted;
                }
                let active = scheduler.next_activation();
                let epoch = ledger.epoch_of(active.round);
                ledger.update(&active)?;
                state = swarm_step(config.algorithm, &state, &active)?;
                let record = swarm_record(config.algorithm, &state, &active, epoch, eps);
                let violation = swarm_guard(config.algorithm, &state, &record.collisions);
                records.push(record);
                if let Some(msg) = violation {
                    diagnostic = Some(msg);
                    break Outcome::InvariantViolation;
                }
            }
        }
        InitialState::Chain { chain } => {
            if n == 0 {
                Outcome::Converged
            } else {
                let mut scheduler = Scheduler::new(config.scheduler.clone(), n)?;
                let mut state = chain;
                loop {
                    if ChainMetrics::of(&state).eps_reached(eps) {
                        break Outcome::Converged;
                    }
                    if ledger.completed() as u64 >= max_epochs {
                        break Outcome::BudgetExhausted;
                    }
                    let picked = scheduler.next_activation();
                    let epoch = ledger.epoch_of(picked.round);
                    ledger.update(&picked)?;
                    // scheduler indices 0..n are the inner robots 1..=n
                    let active = ActivationRecord::new(picked.round, picked.active.iter().map(|i| i + 1).collect());
                    state = gtm_step(&state, &active)?;
                    records.push(RoundRecord {
                        round: active.round,
                        epoch,
                        active: active.active.clone(),
                        positions: pack(&state.positions),
                        lights: None,
                        collisions: Vec::new(),
                        phi: None,
                        phi2: Some([phi2(&state, Axis::X), phi2(&state, Axis::Y)]),
                        line: None,
                    });
                    if !links_connected(&state) {
                        diagnostic = Some(chain_link_diagnostic(&state));
                        break Outcome::InvariantViolation;
                    }
                }
            }
        }
    };
    let end = TraceEnd {
        outcome,
        rounds: records.len() as u64,
        epochs: ledger.completed(),
        epoch_starts: ledger.epoch_starts.clone(),
        diagnostic,
    };
    let trace = Trace { header, records, end };
    if let Some(path) = &config.trace {
        trace.save(path)?;
    }
    Ok(trace)
}

fn chain_link_diagnostic(state: &ChainConfiguration) -> String {
    let long: Vec<(usize, usize)> = state
        .links()
        .iter()
        .enumerate()
        .filter(|(_, w)| w.norm() > 1.0 + TAU_GEO)
        .map(|(i, _)| (i, i + 1))
        .collect();
    format!("round {}: chain links longer than 1 between {long:?}", state.round)
}

/// Distinct joint light states observed over a trace, counted by robot tuple.
pub fn distinct_light_values(trace: &Trace) -> usize {
    let mut seen: BTreeSet<(u8, bool, bool, bool)> = BTreeSet::new();
    let mut add = |l: &LightState| {
        seen.insert((l.counter, l.mov, l.prev, l.fin));
    };
    if let InitialState::Swarm { configuration } = &trace.header.initial {
        configuration.lights().iter().for_each(&mut add);
    }
    for r in &trace.records {
        if let Some(lights) = &r.lights {
            lights.iter().for_each(&mut add);
        }
    }
    seen.len()
}

/// Final consecutive gaps along the line, or `None` if not collinear.
pub fn final_gaps(trace: &Trace) -> Option<Vec<f64>> {
    let positions = trace.final_positions();
    if trace.header.config.algorithm == AlgorithmId::ChainGtm || !is_collinear(&positions) {
        return None;
    }
    Some(gaps_in_order(&positions, &line_order(&positions)).gaps().to_vec())
}
