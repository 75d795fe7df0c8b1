//! The Max-Line potential, its one-round update oracle and the empirical
//! per-round and per-epoch bounds on its decrease.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, TAU_GEO};
use crate::world::GlobalConfiguration;

/// Tolerance for the oracle comparison and the lemma inequalities.
pub const CHECK_TOL: f64 = 1e-9;

/// Gaps of a collinear configuration. `w[0]` is the fixed unit stretch and
/// `w[k]` for `k >= 1` is the gap between the `k`-th and `(k+1)`-th robot in
/// y order, so `w.len()` equals the number of robots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapVector {
    pub w: Vec<f64>,
}

impl GapVector {
    /// From gaps between consecutive robots (`n - 1` values).
    pub fn from_gaps(gaps: &[f64]) -> Self {
        let mut w = Vec::with_capacity(gaps.len() + 1);
        w.push(1.0);
        w.extend_from_slice(gaps);
        GapVector { w }
    }

    /// From y-coordinates listed in line order.
    pub fn from_ys(ys: &[f64]) -> Self {
        let gaps: Vec<f64> = ys.windows(2).map(|p| p[1] - p[0]).collect();
        Self::from_gaps(&gaps)
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.w[1..]
    }

    /// Deviations from the unit stretch.
    pub fn z(&self) -> Vec<f64> {
        self.w.iter().map(|w| w - 1.0).collect()
    }

    /// `w` with the wrap-around unit appended, indexable as `0..=n`.
    fn padded(&self) -> Vec<f64> {
        let mut w = self.w.clone();
        w.push(1.0);
        w
    }
}

/// Sum of squared deviations of the gaps from 1.
pub fn phi(g: &GapVector) -> f64 {
    g.gaps().iter().map(|w| (w - 1.0).powi(2)).sum()
}

/// One round of the oblivious line phase under activation `tau` (indexed by
/// line position): robot `k` shifts by half the difference of its two
/// adjacent gaps, the line ends acting against a unit virtual stretch.
pub fn w_update_oracle(g: &GapVector, tau: &[bool]) -> GapVector {
    let n = g.n();
    assert_eq!(tau.len(), n, "activation vector length");
    let w = g.padded();
    let shift = |k: usize| if tau[k] { 0.5 * (w[k + 1] - w[k]) } else { 0.0 };
    let mut next = g.w.clone();
    for k in 1..n {
        next[k] = w[k] + shift(k) - shift(k - 1);
    }
    GapVector { w: next }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DropTerms {
    pub d_minus: Vec<f64>,
    pub d_mid: Vec<f64>,
    pub d_plus: Vec<f64>,
}

impl DropTerms {
    pub fn total(&self) -> f64 {
        self.d_minus.iter().chain(&self.d_mid).chain(&self.d_plus).sum()
    }
}

/// Per-gap decrease terms; entry `k - 1` belongs to gap `w[k]`.
pub fn drop_terms(g: &GapVector, tau: &[bool]) -> DropTerms {
    let n = g.n();
    let w = g.padded();
    let t = |k: usize| if tau[k] { 1.0 } else { 0.0 };
    let mut terms = DropTerms::default();
    for k in 1..n {
        let mu_minus = t(k - 1) * (t(k - 1) - t(k));
        let mu_plus = t(k) * (t(k) - t(k - 1));
        terms.d_minus.push(mu_minus * (w[k] - w[k - 1]).powi(2));
        terms.d_mid.push(t(k) * t(k - 1) * (w[k - 1] - w[k + 1]).powi(2));
        terms.d_plus.push(mu_plus * (w[k] - w[k + 1]).powi(2));
    }
    terms
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropCheck {
    pub drop: f64,
    pub bound: f64,
    pub residual: f64,
    /// Whether a line end was active in this round.
    pub endpoint_active: bool,
}

impl DropCheck {
    /// `drop >= bound`, and equality when no line end moved.
    pub fn holds(&self) -> bool {
        self.residual >= -CHECK_TOL && (self.endpoint_active || self.residual <= CHECK_TOL)
    }
}

/// Compares the observed decrease of the potential with a quarter of the
/// summed drop terms, after confirming `after` is what the oracle predicts.
pub fn phi_drop_bound_check(before: &GapVector, tau: &[bool], after: &GapVector) -> Result<DropCheck> {
    let predicted = w_update_oracle(before, tau);
    if after.n() != predicted.n() {
        return Err(Error::InvalidParameter("gap vectors of different sizes".into()));
    }
    for (k, (&e, &got)) in predicted.w.iter().zip(&after.w).enumerate() {
        if (e - got).abs() > CHECK_TOL {
            return Err(Error::OracleMismatch {
                index: k,
                expected: e,
                got,
            });
        }
    }
    let drop = phi(before) - phi(after);
    let bound = 0.25 * drop_terms(before, tau).total();
    Ok(DropCheck {
        drop,
        bound,
        residual: drop - bound,
        endpoint_active: tau.first().copied().unwrap_or(false) || tau.last().copied().unwrap_or(false),
    })
}

/// Quarter of the summed squared differences of neighbouring values when
/// the unit stretch and all gaps are sorted.
pub fn sorted_gap_bound(g: &GapVector) -> f64 {
    let mut w = g.w.clone();
    w.sort_by(|a, b| b.total_cmp(a));
    0.25 * w.windows(2).map(|p| (p[0] - p[1]).powi(2)).sum::<f64>()
}

/// Robot positions at the start of one epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochSample {
    pub epoch: usize,
    pub round: u64,
    pub positions: Vec<Point2>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub round: u64,
    pub phi: f64,
    /// Decrease until the next sample.
    pub drop: f64,
    pub sorted_bound: f64,
    /// `drop / phi`, absent when the potential is already zero.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub n: usize,
    pub rows: Vec<EpochRow>,
    pub sorted_bound_violations: Vec<usize>,
    pub ratio_violations: Vec<usize>,
    pub ratio_floor: f64,
    pub min_ratio: Option<f64>,
    /// First epoch whose line has length at least `(1 - eps)(n - 1)`.
    pub first_eps_epoch: Option<usize>,
}

impl EpochReport {
    pub fn passed(&self) -> bool {
        self.sorted_bound_violations.is_empty() && self.ratio_violations.is_empty()
    }
}

/// Robot indices sorted by y (ties by index).
pub fn line_order(positions: &[Point2]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&a, &b| positions[a].y.total_cmp(&positions[b].y).then(a.cmp(&b)));
    order
}

pub fn is_collinear(positions: &[Point2]) -> bool {
    match positions.first() {
        None => true,
        Some(p) => positions.iter().all(|q| (q.x - p.x).abs() <= TAU_GEO),
    }
}

/// Gap vector of `positions` read in the fixed `order`.
pub fn gaps_in_order(positions: &[Point2], order: &[usize]) -> GapVector {
    let ys: Vec<f64> = order.iter().map(|&i| positions[i].y).collect();
    GapVector::from_ys(&ys)
}

/// Per-epoch checks over samples taken at consecutive epoch starts, all of
/// them in the collinear phase.
pub fn epoch_bound_checks(samples: &[EpochSample], eps: f64) -> Result<EpochReport> {
    let Some(first) = samples.first() else {
        return Ok(EpochReport::default());
    };
    let n = first.positions.len();
    let order = line_order(&first.positions);
    let mut gaps = Vec::with_capacity(samples.len());
    for s in samples {
        if !is_collinear(&s.positions) {
            return Err(Error::NotCollinear(s.round));
        }
        if line_order(&s.positions) != order {
            return Err(Error::OrderChanged(s.round));
        }
        gaps.push(gaps_in_order(&s.positions, &order));
    }
    let floor = 1.0 / (8.0 * (n * n) as f64);
    let mut report = EpochReport {
        n,
        ratio_floor: floor,
        ..Default::default()
    };
    let target = (1.0 - eps) * (n as f64 - 1.0);
    for (k, s) in samples.iter().enumerate() {
        let g = &gaps[k];
        if report.first_eps_epoch.is_none() && g.gaps().iter().sum::<f64>() >= target {
            report.first_eps_epoch = Some(s.epoch);
        }
        let Some(next) = gaps.get(k + 1) else { break };
        let p = phi(g);
        let drop = p - phi(next);
        let sorted_bound = sorted_gap_bound(g);
        if drop < sorted_bound - CHECK_TOL {
            report.sorted_bound_violations.push(s.epoch);
        }
        let ratio = (p > 1e-12).then(|| drop / p);
        if let Some(r) = ratio {
            if r < floor - CHECK_TOL {
                report.ratio_violations.push(s.epoch);
            }
            report.min_ratio = Some(report.min_ratio.map_or(r, |m: f64| m.min(r)));
        }
        report.rows.push(EpochRow {
            epoch: s.epoch,
            round: s.round,
            phi: p,
            drop,
            sorted_bound,
            ratio,
        });
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineMetrics {
    pub is_line: bool,
    /// Vertical extent of the configuration.
    pub length: f64,
    pub approx: bool,
}

/// Whether the robots form a vertical line of length at least `(1-eps)(n-1)c`.
pub fn line_metrics(config: &GlobalConfiguration, eps: f64) -> LineMetrics {
    let positions = config.positions();
    let is_line = is_collinear(&positions);
    let (lo, hi) = positions
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
    let length = if positions.is_empty() { 0.0 } else { hi - lo };
    let needed = (1.0 - eps) * (config.n() as f64 - 1.0) * config.range.radius;
    LineMetrics {
        is_line,
        length,
        approx: is_line && length >= needed - TAU_GEO,
    }
}

/// Collinear with every consecutive gap equal to the range radius.
pub fn is_max_line(config: &GlobalConfiguration, tol: f64) -> bool {
    let positions = config.positions();
    if !is_collinear(&positions) {
        return false;
    }
    let order = line_order(&positions);
    gaps_in_order(&positions, &order)
        .gaps()
        .iter()
        .all(|w| (w - config.range.radius).abs() <= tol)
}
