use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::analysis::LineMetrics;
use crate::chain::ChainConfiguration;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::world::{GlobalConfiguration, LightState};

pub const TRACE_VERSION: u32 = 1;

/// The exact starting state, embedded so a trace replays without its source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Swarm { configuration: GlobalConfiguration },
    Chain { chain: ChainConfiguration },
}

impl InitialState {
    pub fn n(&self) -> usize {
        match self {
            InitialState::Swarm { configuration } => configuration.n(),
            InitialState::Chain { chain } => chain.n(),
        }
    }

    pub fn positions(&self) -> Vec<Point2> {
        match self {
            InitialState::Swarm { configuration } => configuration.positions(),
            InitialState::Chain { chain } => chain.positions.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub version: u32,
    pub config: RunConfig,
    pub max_epochs: u64,
    pub fairness_bound: u64,
    pub initial: InitialState,
}

/// One executed round: who was active and where everyone stood afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub epoch: usize,
    pub active: Vec<usize>,
    pub positions: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lights: Option<Vec<LightState>>,
    pub collisions: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi2: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<LineMetrics>,
}

impl RoundRecord {
    pub fn points(&self) -> Vec<Point2> {
        self.positions.iter().map(|&[x, y]| Point2::new(x, y)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Converged,
    BudgetExhausted,
    InvariantViolation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Converged => 0,
            Outcome::BudgetExhausted => 2,
            Outcome::InvariantViolation => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEnd {
    pub outcome: Outcome,
    pub rounds: u64,
    /// Epochs fully elapsed when the run stopped.
    pub epochs: usize,
    pub epoch_starts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum TraceLine {
    Header(TraceHeader),
    Round(RoundRecord),
    End(TraceEnd),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub records: Vec<RoundRecord>,
    pub end: TraceEnd,
}

impl Trace {
    /// Positions at the start of `round` (before its moves).
    pub fn positions_at(&self, round: u64) -> Option<Vec<Point2>> {
        if round == 0 {
            Some(self.header.initial.positions())
        } else {
            self.records.get(round as usize - 1).map(RoundRecord::points)
        }
    }

    pub fn final_positions(&self) -> Vec<Point2> {
        self.positions_at(self.records.len() as u64)
            .expect("records are contiguous")
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        serde_json::to_writer(&mut out, &TraceLine::Header(self.header.clone()))?;
        out.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut out, &TraceLine::Round(r.clone()))?;
            out.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut out, &TraceLine::End(self.end.clone()))?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(input: impl Read) -> Result<Trace> {
        let mut header = None;
        let mut records: Vec<RoundRecord> = Vec::new();
        let mut end = None;
        for (lineno, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: TraceLine = serde_json::from_str(&line)
                .map_err(|e| Error::MalformedTrace(format!("line {}: {e}", lineno + 1)))?;
            match parsed {
                TraceLine::Header(h) if header.is_none() && lineno == 0 => header = Some(h),
                TraceLine::Round(r) if header.is_some() && end.is_none() => {
                    if r.round != records.len() as u64 {
                        return Err(Error::MalformedTrace(format!(
                            "line {}: round {} out of sequence",
                            lineno + 1,
                            r.round
                        )));
                    }
                    records.push(r);
                }
                TraceLine::End(e) if header.is_some() && end.is_none() => end = Some(e),
                _ => {
                    return Err(Error::MalformedTrace(format!(
                        "line {}: unexpected record",
                        lineno + 1
                    )))
                }
            }
        }
        let header = header.ok_or_else(|| Error::MalformedTrace("missing header".into()))?;
        if header.version != TRACE_VERSION {
            return Err(Error::MalformedTrace(format!("unsupported version {}", header.version)));
        }
        let end = end.ok_or_else(|| Error::MalformedTrace("missing end record".into()))?;
        Ok(Trace {
            header,
            records,
            end,
        })
    }

    pub fn load(path: &Path) -> Result<Trace> {
        Self::read_from(std::fs::File::open(path)?)
    }
}
