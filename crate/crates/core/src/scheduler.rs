//! Activation sets for FSYNC and SSYNC, fairness forcing and epoch accounting.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The robots active in one round, sorted by identifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationRecord {
    pub round: u64,
    pub active: Vec<usize>,
}

impl ActivationRecord {
    pub fn new(round: u64, mut active: Vec<usize>) -> Self {
        active.sort_unstable();
        active.dedup();
        ActivationRecord { round, active }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.active.binary_search(&id).is_ok()
    }

    /// The activation indicator vector over `n` robots.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut tau = vec![false; n];
        for &id in &self.active {
            if id < n {
                tau[id] = true;
            }
        }
        tau
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchedulerKind {
    Fsync,
    SsyncRandom { p: f64 },
    SsyncRoundrobin { k: usize },
    SsyncAdversary { script: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulerSpec {
    #[serde(flatten)]
    pub kind: SchedulerKind,
    /// Rounds within which every robot is activated at least once; `None`
    /// means the default of `2n` (1 under FSYNC).
    #[serde(default)]
    pub fairness_bound: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl SchedulerSpec {
    pub fn fsync() -> Self {
        SchedulerSpec {
            kind: SchedulerKind::Fsync,
            fairness_bound: None,
            seed: 0,
        }
    }

    pub fn ssync_random(p: f64, seed: u64) -> Self {
        SchedulerSpec {
            kind: SchedulerKind::SsyncRandom { p },
            fairness_bound: None,
            seed,
        }
    }

    pub fn ssync_roundrobin(k: usize) -> Self {
        SchedulerSpec {
            kind: SchedulerKind::SsyncRoundrobin { k },
            fairness_bound: None,
            seed: 0,
        }
    }

    pub fn ssync_adversary(script: Vec<Vec<usize>>) -> Self {
        SchedulerSpec {
            kind: SchedulerKind::SsyncAdversary { script },
            fairness_bound: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_fairness(mut self, bound: u64) -> Self {
        self.fairness_bound = Some(bound);
        self
    }

    pub fn is_fsync(&self) -> bool {
        matches!(self.kind, SchedulerKind::Fsync)
    }

    pub fn effective_fairness(&self, n: usize) -> u64 {
        if self.is_fsync() {
            1
        } else {
            self.fairness_bound.unwrap_or(2 * n.max(1) as u64)
        }
    }

    /// Parses `fsync`, `ssync-random:P`, `ssync-roundrobin:K` or
    /// `ssync-adversary:FILE` (a JSON list of lists of identifiers).
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let (name, arg) = match text.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let bad = |msg: &str| Error::InvalidParameter(format!("scheduler `{text}`: {msg}"));
        let kind = match (name, arg) {
            ("fsync", None) => SchedulerKind::Fsync,
            ("ssync-random", Some(p)) => SchedulerKind::SsyncRandom {
                p: f64::from_str(p).map_err(|_| bad("probability is not a number"))?,
            },
            ("ssync-roundrobin", Some(k)) => SchedulerKind::SsyncRoundrobin {
                k: usize::from_str(k).map_err(|_| bad("k is not an integer"))?,
            },
            ("ssync-adversary", Some(path)) => SchedulerKind::SsyncAdversary {
                script: load_script(Path::new(path))?,
            },
            _ => return Err(bad("unknown scheduler")),
        };
        let spec = SchedulerSpec {
            kind,
            fairness_bound: None,
            seed,
        };
        spec.check(usize::MAX)?;
        Ok(spec)
    }

    /// Validates parameters against a swarm of `n` robots.
    pub fn check(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.fairness_bound == Some(0) {
            return bad("fairness bound must be at least 1".into());
        }
        if self.is_fsync() && self.fairness_bound.is_some_and(|e| e != 1) {
            return bad("fsync implies a fairness bound of 1".into());
        }
        match &self.kind {
            SchedulerKind::Fsync => {}
            SchedulerKind::SsyncRandom { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return bad(format!("activation probability {p} is outside (0, 1]"));
                }
            }
            SchedulerKind::SsyncRoundrobin { k } => {
                if *k == 0 {
                    return bad("round-robin batch size must be positive".into());
                }
            }
            SchedulerKind::SsyncAdversary { script } => {
                if script.is_empty() || script.iter().any(|s| s.is_empty()) {
                    return bad("adversary script must be a non-empty list of non-empty sets".into());
                }
                if let Some(&id) = script.iter().flatten().find(|&&id| id >= n) {
                    return bad(format!("adversary script names robot {id} of {n}"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SchedulerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SchedulerKind::Fsync => f.write_str("fsync"),
            SchedulerKind::SsyncRandom { p } => write!(f, "ssync-random:{p}"),
            SchedulerKind::SsyncRoundrobin { k } => write!(f, "ssync-roundrobin:{k}"),
            SchedulerKind::SsyncAdversary { script } => {
                write!(f, "ssync-adversary:<{} rounds>", script.len())
            }
        }
    }
}

pub fn load_script(path: &Path) -> Result<Vec<Vec<usize>>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Stateful activation generator for one simulation.
#[derive(Clone, Debug)]
pub struct Scheduler {
    spec: SchedulerSpec,
    n: usize,
    fairness: u64,
    rng: ChaCha8Rng,
    idle: Vec<u64>,
    cursor: usize,
    round: u64,
}

impl Scheduler {
    pub fn new(spec: SchedulerSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("scheduler needs at least one robot".into()));
        }
        spec.check(n)?;
        Ok(Scheduler {
            fairness: spec.effective_fairness(n),
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            spec,
            n,
            idle: vec![0; n],
            cursor: 0,
            round: 0,
        })
    }

    pub fn spec(&self) -> &SchedulerSpec {
        &self.spec
    }

    pub fn fairness_bound(&self) -> u64 {
        self.fairness
    }

    /// Activation set for the next round.
    pub fn next_activation(&mut self) -> ActivationRecord {
        let forced: Vec<bool> = self
            .idle
            .iter()
            .map(|&idle| idle + 1 >= self.fairness)
            .collect();
        let mut chosen = match &self.spec.kind {
            SchedulerKind::Fsync => vec![true; self.n],
            SchedulerKind::SsyncRandom { p } => {
                let p = *p;
                loop {
                    let draw: Vec<bool> = (0..self.n)
                        .map(|i| self.rng.random_bool(p) || forced[i])
                        .collect();
                    if draw.iter().any(|&b| b) {
                        break draw;
                    }
                }
            }
            SchedulerKind::SsyncRoundrobin { k } => {
                let mut set = vec![false; self.n];
                for j in 0..(*k).min(self.n) {
                    set[(self.cursor + j) % self.n] = true;
                }
                self.cursor = (self.cursor + *k) % self.n;
                set
            }
            SchedulerKind::SsyncAdversary { script } => {
                let mut set = vec![false; self.n];
                for &id in &script[(self.round as usize) % script.len()] {
                    set[id] = true;
                }
                set
            }
        };
        for (c, f) in chosen.iter_mut().zip(&forced) {
            *c |= *f;
        }
        for (idle, &c) in self.idle.iter_mut().zip(&chosen) {
            *idle = if c { 0 } else { *idle + 1 };
        }
        let active = (0..self.n).filter(|&i| chosen[i]).collect();
        let record = ActivationRecord::new(self.round, active);
        self.round += 1;
        record
    }
}

/// Round indices at which epochs start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochLedger {
    pub epoch_starts: Vec<u64>,
    n: usize,
    seen: Vec<bool>,
    next_round: u64,
}

impl EpochLedger {
    pub fn new(n: usize) -> Self {
        EpochLedger {
            epoch_starts: vec![0],
            n,
            seen: vec![false; n],
            next_round: 0,
        }
    }

    /// Accounts for one round; a new epoch starts after the round in which
    /// the last not-yet-active robot of the current epoch was activated.
    pub fn update(&mut self, record: &ActivationRecord) -> Result<()> {
        if record.round != self.next_round {
            return Err(Error::OutOfOrder {
                expected: self.next_round,
                got: record.round,
            });
        }
        for &id in &record.active {
            if id >= self.n {
                return Err(Error::UnknownRobot(id));
            }
            self.seen[id] = true;
        }
        if self.seen.iter().all(|&s| s) {
            self.epoch_starts.push(record.round + 1);
            self.seen.iter_mut().for_each(|s| *s = false);
        }
        self.next_round += 1;
        Ok(())
    }

    /// Number of epochs that have fully elapsed.
    pub fn completed(&self) -> usize {
        self.epoch_starts.len() - 1
    }

    /// Zero-based epoch containing `round`.
    pub fn epoch_of(&self, round: u64) -> usize {
        self.epoch_starts.partition_point(|&s| s <= round) - 1
    }
}
