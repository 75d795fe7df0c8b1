use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate, AlgorithmId, InitialSource, Outcome, RunConfig};
use crate::error::{Error, Result};
use crate::scheduler::SchedulerSpec;

/// The parameter varied across a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepAxis {
    /// Random connected starts of each size.
    N { values: Vec<usize> },
    /// Starts of fixed size spanning each diameter.
    Delta { n: usize, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub algorithm: AlgorithmId,
    pub scheduler: SchedulerSpec,
    pub axis: SweepAxis,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    #[serde(default)]
    pub max_epochs: Option<u64>,
    /// One trace file per cell, written when set.
    #[serde(default)]
    pub trace_dir: Option<PathBuf>,
}

impl SweepSpec {
    fn cells(&self) -> Vec<(f64, RunConfig)> {
        let mut cells = Vec::new();
        let params: Vec<(f64, usize, Option<f64>)> = match &self.axis {
            SweepAxis::N { values } => values.iter().map(|&n| (n as f64, n, None)).collect(),
            SweepAxis::Delta { n, values } => values.iter().map(|&d| (d, *n, Some(d))).collect(),
        };
        for &(param, n, delta) in &params {
            for &seed in &self.seeds {
                let initial = match delta {
                    None => InitialSource::Random { n, seed },
                    Some(delta) => InitialSource::Spanning { n, delta, seed },
                };
                let mut cfg = RunConfig::new(self.algorithm, self.scheduler.clone().with_seed(seed), initial)
                    .with_epsilon(self.epsilon);
                cfg.max_epochs = self.max_epochs;
                cfg.trace = self
                    .trace_dir
                    .as_ref()
                    .map(|d| d.join(format!("{}-{param}-{seed}.jsonl", self.algorithm)));
                cells.push((param, cfg));
            }
        }
        cells
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub n: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub rounds: u64,
    pub epochs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    /// `(param, mean rounds, mean epochs)` per grid value.
    pub means: Vec<(f64, f64, f64)>,
    /// Log-log slope of mean epochs against the swept parameter.
    pub epochs_exponent: Option<f64>,
    pub rounds_exponent: Option<f64>,
}

impl SweepSummary {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.outcome == Outcome::Converged)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["param", "n", "seed", "outcome", "rounds", "epochs"])?;
        for r in &self.rows {
            w.write_record([
                r.param.to_string(),
                r.n.to_string(),
                r.seed.to_string(),
                serde_json::to_value(r.outcome)?.as_str().unwrap_or_default().to_string(),
                r.rounds.to_string(),
                r.epochs.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-parameter means plus the fitted exponents.
    pub fn write_summary_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["param", "mean_rounds", "mean_epochs", "rounds_exponent", "epochs_exponent"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for &(p, r, e) in &self.means {
            w.write_record([
                p.to_string(),
                r.to_string(),
                e.to_string(),
                opt(self.rounds_exponent),
                opt(self.epochs_exponent),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `ln y` against `ln x`; needs two distinct x.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let m = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs every cell of the grid in parallel; results keep grid order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepSummary> {
    if spec.seeds.is_empty() {
        return Err(Error::InvalidParameter("a sweep needs at least one seed".into()));
    }
    if let Some(dir) = &spec.trace_dir {
        std::fs::create_dir_all(dir)?;
    }
    let rows: Vec<SweepRow> = spec
        .cells()
        .into_par_iter()
        .map(|(param, cfg)| {
            let trace = simulate(&cfg)?;
            let seed = cfg.scheduler.seed;
            if trace.end.outcome == Outcome::InvariantViolation {
                return Err(Error::SweepFailed(format!(
                    "param {param}, seed {seed}: {}",
                    trace.end.diagnostic.unwrap_or_default()
                )));
            }
            Ok(SweepRow {
                param,
                n: trace.header.initial.n(),
                seed,
                outcome: trace.end.outcome,
                rounds: trace.end.rounds,
                epochs: trace.end.epochs,
            })
        })
        .collect::<Result<_>>()?;
    let mut means = Vec::new();
    for chunk in rows.chunks(spec.seeds.len()) {
        let k = chunk.len() as f64;
        means.push((
            chunk[0].param,
            chunk.iter().map(|r| r.rounds as f64).sum::<f64>() / k,
            chunk.iter().map(|r| r.epochs as f64).sum::<f64>() / k,
        ));
    }
    let rounds_exponent = fit_exponent(&means.iter().map(|m| (m.0, m.1)).collect::<Vec<_>>());
    let epochs_exponent = fit_exponent(&means.iter().map(|m| (m.0, m.2)).collect::<Vec<_>>());
    Ok(SweepSummary {
        rows,
        means,
        epochs_exponent,
        rounds_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x * x)).collect();
        assert!((fit_exponent(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fit_exponent(&pts[..1]), None);
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let spec = SweepSpec {
            algorithm: AlgorithmId::MaxlineLumiFsync,
            scheduler: SchedulerSpec::fsync(),
            axis: SweepAxis::N { values: vec![3, 5] },
            seeds: vec![1, 2],
            epsilon: 0.01,
            max_epochs: None,
            trace_dir: None,
        };
        let a = sweep(&spec).unwrap();
        let b = sweep(&spec).unwrap();
        assert_eq!(a, b);
        let order: Vec<(usize, u64)> = a.rows.iter().map(|r| (r.n, r.seed)).collect();
        assert_eq!(order, vec![(3, 1), (3, 2), (5, 1), (5, 2)]);
    }
}
