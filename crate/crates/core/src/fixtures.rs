//! Impossibility constructions, seeded random starts and the stuck checker.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Point2, RangeModel};
use crate::world::{take_snapshot, Chirality, GlobalConfiguration};

/// Indices of the seven robots of the C2 construction.
pub mod c2 {
    pub const LEFT_TOP: usize = 0;
    pub const LEFT_MID: usize = 1;
    pub const LEFT_BOTTOM: usize = 2;
    pub const CENTER: usize = 3;
    pub const RIGHT_TOP: usize = 4;
    pub const RIGHT_MID: usize = 5;
    pub const RIGHT_BOTTOM: usize = 6;
    /// Robots that can only leave by breaking the graph.
    pub const STUCK: [usize; 3] = [LEFT_MID, CENTER, RIGHT_MID];
    /// Robots whose view matches the end of a finished line.
    pub const LINE_ENDS: [usize; 4] = [LEFT_TOP, LEFT_BOTTOM, RIGHT_TOP, RIGHT_BOTTOM];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FixtureKind {
    C1,
    C2,
    /// The C2 construction for a viewing range of `alpha` times the
    /// connectivity range.
    Alpha(f64),
}

impl FromStr for FixtureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(FixtureKind::C1),
            "c2" => Ok(FixtureKind::C2),
            other => match other.strip_prefix("alpha:") {
                Some(a) => a
                    .parse()
                    .map(FixtureKind::Alpha)
                    .map_err(|_| Error::InvalidParameter(format!("bad alpha in `{s}`"))),
                None => Err(Error::InvalidParameter(format!("unknown fixture `{s}`"))),
            },
        }
    }
}

impl TryFrom<String> for FixtureKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FixtureKind> for String {
    fn from(k: FixtureKind) -> String {
        k.to_string()
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureKind::C1 => f.write_str("c1"),
            FixtureKind::C2 => f.write_str("c2"),
            FixtureKind::Alpha(a) => write!(f, "alpha:{a}"),
        }
    }
}

fn scaled(points: &[(f64, f64)], c: f64) -> Vec<Point2> {
    points.iter().map(|&(x, y)| Point2::new(x * c, y * c)).collect()
}

/// Positions of the α-scaled construction in units of `c`. Line ends come
/// first (left-top, left-bottom, right-top, right-bottom), then the rest.
fn alpha_positions(alpha: f64) -> Vec<(f64, f64)> {
    let s = alpha.ceil() as usize;
    let half = (s as f64 + 1.0) / 2.0;
    let col = |x: f64, sign: f64| (1..=s).map(move |j| (x, sign * (s + 1 - j) as f64));
    let mut ends = Vec::new();
    let mut rest = Vec::new();
    for (x, sign) in [(-half, 1.0), (-half, -1.0), (half, 1.0), (half, -1.0)] {
        let mut column: Vec<(f64, f64)> = col(x, sign).collect();
        ends.push(column.remove(0));
        rest.extend(column);
    }
    rest.push((-half, 0.0));
    rest.push((half, 0.0));
    rest.extend((1..=s).map(|j| (-half + j as f64, 0.0)));
    ends.extend(rest);
    ends
}

/// Builds a fixture under a circular range of radius `c`.
pub fn make_fixture(kind: FixtureKind, c: f64) -> Result<GlobalConfiguration> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
    }
    let points = match kind {
        FixtureKind::C1 => vec![(0.0, 0.0), (0.5, 0.3), (1.0, 0.0)],
        FixtureKind::C2 => vec![
            (-1.0, 1.0),
            (-1.0, 0.0),
            (-1.0, -1.0),
            (0.0, 0.0),
            (1.0, 1.0),
            (1.0, 0.0),
            (1.0, -1.0),
        ],
        FixtureKind::Alpha(a) => {
            if !(a > 1.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!("alpha must exceed 1, got {a}")));
            }
            alpha_positions(a)
        }
    };
    GlobalConfiguration::with_uniform_chirality(&scaled(&points, c), RangeModel::circular(c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotProbes {
    pub robot: usize,
    pub probes: usize,
    /// Nonzero displacements that keep the graph connected.
    pub preserving: Vec<Point2>,
    /// Nonzero displacements that keep every current neighbor in range.
    pub edge_preserving: Vec<Point2>,
    pub zero_preserves: bool,
}

impl RobotProbes {
    /// No nonzero move keeps all of the robot's current neighbors. This is
    /// the notion a robot can check from its own view.
    pub fn is_stuck(&self) -> bool {
        self.edge_preserving.is_empty()
    }

    /// No nonzero move keeps the whole graph connected.
    pub fn is_globally_stuck(&self) -> bool {
        self.preserving.is_empty()
    }

    /// Every probe `(d, 0)` with `0 < d <= limit` keeps all current neighbors.
    pub fn free_rightwards(&self, grid: &[f64], limit: f64) -> bool {
        grid.iter()
            .filter(|&&d| d > 0.0 && d <= limit + geometry::TAU_GEO)
            .all(|&d| {
                self.edge_preserving
                    .iter()
                    .any(|p| (p.x - d).abs() <= 1e-12 && p.y.abs() <= 1e-12)
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StuckReport {
    pub range: RangeModel,
    /// Probe offsets along one axis.
    pub grid: Vec<f64>,
    pub robots: Vec<RobotProbes>,
}

impl StuckReport {
    pub fn robot(&self, id: usize) -> &RobotProbes {
        &self.robots[id]
    }
}

/// Probes `probe_grid²` displacements over `[-r, r]²` for every robot and
/// records which ones leave the graph connected under `model`.
pub fn stuck_check(config: &GlobalConfiguration, model: &RangeModel, probe_grid: usize) -> Result<StuckReport> {
    if probe_grid < 2 {
        return Err(Error::InvalidParameter("probe grid needs at least 2 points".into()));
    }
    let base = config.positions();
    if !geometry::is_connected(&geometry::neighbors(&base, model)) {
        return Err(Error::Disconnected(model.kind.to_string()));
    }
    let r = model.radius;
    let step = 2.0 * r / (probe_grid - 1) as f64;
    let grid: Vec<f64> = (0..probe_grid)
        .map(|k| {
            let v = -r + k as f64 * step;
            // Snap values that should be exact grid points, such as 0 and ±r/2.
            (v / step).round() * step
        })
        .collect();
    let mut robots = Vec::with_capacity(base.len());
    for id in 0..base.len() {
        let mut probes = RobotProbes {
            robot: id,
            probes: 0,
            preserving: Vec::new(),
            edge_preserving: Vec::new(),
            zero_preserves: false,
        };
        let adjacent: Vec<Point2> = base
            .iter()
            .enumerate()
            .filter(|&(j, p)| j != id && model.contains(*p - base[id]))
            .map(|(_, p)| *p)
            .collect();
        for &dx in &grid {
            for &dy in &grid {
                let d = Point2::new(dx, dy);
                let mut moved = base.clone();
                moved[id] = base[id] + d;
                let ok = geometry::is_connected(&geometry::neighbors(&moved, model));
                probes.probes += 1;
                if d == Point2::ORIGIN {
                    probes.zero_preserves = ok;
                } else {
                    if ok {
                        probes.preserving.push(d);
                    }
                    if adjacent.iter().all(|&q| model.contains(q - moved[id])) {
                        probes.edge_preserving.push(d);
                    }
                }
            }
        }
        robots.push(probes);
    }
    Ok(StuckReport {
        range: *model,
        grid,
        robots,
    })
}

fn sorted_offsets(mut v: Vec<Point2>) -> Vec<Point2> {
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    v
}

fn same_multiset(a: &[Point2], b: &[Point2]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.approx_eq(*q))
}

/// Whether `robot`'s view under `view` equals the view of an end robot of a
/// finished vertical line with spacing `spacing`, up to flipping the y-axis.
pub fn indistinguishable_from_line_end(
    config: &GlobalConfiguration,
    robot: usize,
    view: RangeModel,
    spacing: f64,
) -> Result<bool> {
    let mut seen = config.clone();
    seen.range = view;
    let mine: Vec<Point2> = take_snapshot(&seen, robot)?
        .neighbors
        .iter()
        .map(|nb| nb.offset)
        .collect();

    let len = (view.radius / spacing).ceil() as usize + 2;
    let line: Vec<Point2> = (0..len).map(|k| Point2::new(0.0, -(k as f64) * spacing)).collect();
    let solved = GlobalConfiguration::with_uniform_chirality(&line, view)?;
    let end: Vec<Point2> = take_snapshot(&solved, 0)?
        .neighbors
        .iter()
        .map(|nb| nb.offset)
        .collect();
    let flipped: Vec<Point2> = end.iter().map(|p| Point2::new(p.x, -p.y)).collect();
    let mine = sorted_offsets(mine);
    Ok(same_multiset(&mine, &sorted_offsets(end)) || same_multiset(&mine, &sorted_offsets(flipped)))
}

const PLACEMENT_ATTEMPTS: usize = 100_000;

fn random_chiralities(rng: &mut ChaCha8Rng, n: usize) -> Vec<Chirality> {
    (0..n)
        .map(|_| {
            if rng.random_bool(0.5) {
                Chirality::Positive
            } else {
                Chirality::Negative
            }
        })
        .collect()
}

fn far_enough(points: &[Point2], p: Point2, min_sep: f64) -> bool {
    points.iter().all(|q| (*q - p).norm() >= min_sep)
}

/// A connected configuration grown one robot at a time, each new robot
/// placed uniformly in the range of a uniformly chosen earlier robot.
pub fn random_connected(n: usize, model: RangeModel, seed: u64) -> Result<GlobalConfiguration> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one robot".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = model.radius;
    let min_sep = 0.01 * r;
    let mut points = vec![Point2::ORIGIN];
    let mut attempts = 0;
    while points.len() < n {
        attempts += 1;
        if attempts > PLACEMENT_ATTEMPTS {
            return Err(Error::RetryCapExceeded(PLACEMENT_ATTEMPTS));
        }
        let anchor = points[rng.random_range(0..points.len())];
        let d = Point2::new(rng.random_range(-r..=r), rng.random_range(-r..=r));
        if !model.contains(d) {
            continue;
        }
        let p = anchor + d;
        if far_enough(&points, p, min_sep) {
            points.push(p);
        }
    }
    let chir = random_chiralities(&mut rng, n);
    GlobalConfiguration::new(&points, &chir, model)
}

/// A connected configuration of `n` robots whose diameter is about `delta`:
/// a straight backbone of length `delta` in a random direction with the
/// remaining robots scattered next to it.
pub fn random_spanning(n: usize, delta: f64, model: RangeModel, seed: u64) -> Result<GlobalConfiguration> {
    let r = model.radius;
    let links = (delta / (0.9 * r)).ceil().max(1.0) as usize;
    if n < links + 1 {
        return Err(Error::InvalidParameter(format!(
            "{n} robots cannot span a diameter of {delta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let dir = Point2::new(theta.cos(), theta.sin());
    let spacing = delta / links as f64;
    let mut points: Vec<Point2> = (0..=links).map(|k| dir * (k as f64 * spacing)).collect();
    let backbone = points.len();
    let min_sep = 0.01 * r;
    let mut attempts = 0;
    while points.len() < n {
        attempts += 1;
        if attempts > PLACEMENT_ATTEMPTS {
            return Err(Error::RetryCapExceeded(PLACEMENT_ATTEMPTS));
        }
        let anchor = points[rng.random_range(0..backbone)];
        let d = Point2::new(rng.random_range(-0.5 * r..=0.5 * r), rng.random_range(-0.5 * r..=0.5 * r));
        let p = anchor + d;
        if far_enough(&points, p, min_sep) {
            points.push(p);
        }
    }
    let chir = random_chiralities(&mut rng, n);
    GlobalConfiguration::new(&points, &chir, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_coordinates_and_scaling() {
        let one = make_fixture(FixtureKind::C2, 1.0).unwrap();
        assert_eq!(one.n(), 7);
        assert_eq!(one.robots[c2::LEFT_TOP].position, Point2::new(-1.0, 1.0));
        assert_eq!(one.robots[c2::RIGHT_BOTTOM].position, Point2::new(1.0, -1.0));
        let two = make_fixture(FixtureKind::C2, 2.0).unwrap();
        for (a, b) in one.positions().iter().zip(two.positions()) {
            assert_eq!(*a * 2.0, b);
        }
        assert!(make_fixture(FixtureKind::C2, 0.0).is_err());
        assert!(make_fixture(FixtureKind::Alpha(0.5), 1.0).is_err());
    }

    #[test]
    fn c2_left_top_sees_only_left_mid() {
        let cfg = make_fixture(FixtureKind::C2, 1.0).unwrap();
        let g = cfg.graph();
        let nbrs: Vec<usize> = (0..7).filter(|&j| g.has_edge(c2::LEFT_TOP, j)).collect();
        assert_eq!(nbrs, vec![c2::LEFT_MID]);
        assert!(cfg.is_connected());
        let d = geometry::diameter_stats(&cfg.positions());
        assert_eq!((d.delta_x, d.delta_y), (2.0, 2.0));
    }

    #[test]
    fn alpha_two_has_twelve_robots() {
        let cfg = make_fixture(FixtureKind::Alpha(2.0), 1.0).unwrap();
        assert_eq!(cfg.n(), 12);
        assert!(cfg.is_connected());
        assert_eq!(make_fixture(FixtureKind::Alpha(3.0), 1.0).unwrap().n(), 17);
    }

    #[test]
    fn zero_probe_always_preserves() {
        let cfg = make_fixture(FixtureKind::C2, 1.0).unwrap();
        let report = stuck_check(&cfg, &RangeModel::square(1.0), 5).unwrap();
        assert!(report.robots.iter().all(|r| r.zero_preserves));
        assert_eq!(report.robots[0].probes, 25);
    }

    #[test]
    fn c2_circular_probes() {
        let cfg = make_fixture(FixtureKind::C2, 1.0).unwrap();
        let report = stuck_check(&cfg, &RangeModel::circular(1.0), 21).unwrap();
        for id in c2::STUCK {
            assert!(report.robot(id).is_stuck(), "robot {id}");
        }
        assert!(report.robot(c2::LEFT_MID).is_globally_stuck());
        // The center may hop to (0, ±1): it drops both neighbors but sits
        // exactly one unit from two corners, so the graph stays connected.
        let mut hops = report.robot(c2::CENTER).preserving.clone();
        hops.sort_by(|a, b| a.y.total_cmp(&b.y));
        assert_eq!(hops, vec![Point2::new(0.0, -1.0), Point2::new(0.0, 1.0)]);
    }

    #[test]
    fn c2_square_left_mid_slides_right() {
        let cfg = make_fixture(FixtureKind::C2, 1.0).unwrap();
        let report = stuck_check(&cfg, &RangeModel::square(1.0), 21).unwrap();
        let mid = report.robot(c2::LEFT_MID);
        assert!(mid.free_rightwards(&report.grid, 1.0));
        assert!(mid.edge_preserving.contains(&Point2::new(0.5, 0.0)));
    }

    #[test]
    fn fixture_names_parse() {
        assert_eq!("C2".parse::<FixtureKind>().unwrap(), FixtureKind::C2);
        assert_eq!("alpha:2.5".parse::<FixtureKind>().unwrap(), FixtureKind::Alpha(2.5));
        assert!("c3".parse::<FixtureKind>().is_err());
    }

    #[test]
    fn random_connected_examples() {
        let one = random_connected(1, RangeModel::square(1.0), 4).unwrap();
        assert_eq!(one.positions(), vec![Point2::ORIGIN]);
        let a = random_connected(20, RangeModel::square(1.0), 4).unwrap();
        let b = random_connected(20, RangeModel::square(1.0), 4).unwrap();
        assert_eq!(a, b);
        assert!(a.validate_initial().is_ok());
    }

    #[test]
    fn spanning_has_requested_diameter() {
        let cfg = random_spanning(40, 8.0, RangeModel::square(1.0), 3).unwrap();
        assert!(cfg.validate_initial().is_ok());
        let d = geometry::diameter_stats(&cfg.positions()).delta;
        assert!((8.0..=9.5).contains(&d), "diameter {d}");
    }
}
