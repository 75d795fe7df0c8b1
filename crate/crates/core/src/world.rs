//! Global configuration, per-robot frames, lights and the snapshot/move cycle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, AdjacencyGraph, Point2, RangeModel, TAU_GEO};
use crate::scheduler::ActivationRecord;

/// Default for the smallest positive local y when no robot qualifies.
pub const DEFAULT_Y_MIN: f64 = 0.1;

/// Externally visible lights. The counter cycles through `0..3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LightState {
    #[serde(rename = "c")]
    pub counter: u8,
    pub mov: bool,
    pub prev: bool,
    #[serde(rename = "final")]
    pub fin: bool,
}

impl LightState {
    pub fn is_valid(&self) -> bool {
        self.counter < 3 && !(self.mov && self.prev)
    }

    pub fn incremented(mut self) -> Self {
        self.counter = (self.counter + 1) % 3;
        self
    }

    /// Neither `mov` nor `prev` is set.
    pub fn quiescent(&self) -> bool {
        !self.mov && !self.prev
    }
}

/// Orientation of a robot's local y-axis relative to the global one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Chirality {
    Positive,
    Negative,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Positive => 1.0,
            Chirality::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Chirality::Positive => Chirality::Negative,
            Chirality::Negative => Chirality::Positive,
        }
    }
}

impl From<Chirality> for i8 {
    fn from(c: Chirality) -> i8 {
        match c {
            Chirality::Positive => 1,
            Chirality::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Chirality {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Chirality::Positive),
            -1 => Ok(Chirality::Negative),
            other => Err(format!("chirality must be 1 or -1, got {other}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RobotRecord", into = "RobotRecord")]
pub struct RobotState {
    pub id: usize,
    pub position: Point2,
    pub chirality: Chirality,
    pub visible: LightState,
    pub pending: LightState,
}

impl RobotState {
    pub fn new(id: usize, position: Point2, chirality: Chirality) -> Self {
        RobotState {
            id,
            position,
            chirality,
            visible: LightState::default(),
            pending: LightState::default(),
        }
    }

    /// Converts a point in this robot's local frame to the global frame.
    pub fn to_global(&self, local: Point2) -> Point2 {
        Point2::new(
            self.position.x + local.x,
            self.position.y + self.chirality.sign() * local.y,
        )
    }

    pub fn to_local(&self, global: Point2) -> Point2 {
        let d = global - self.position;
        Point2::new(d.x, self.chirality.sign() * d.y)
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct RobotRecord {
    id: usize,
    x: f64,
    y: f64,
    chirality: Chirality,
    lights: LightState,
}

impl From<RobotRecord> for RobotState {
    fn from(r: RobotRecord) -> Self {
        RobotState {
            id: r.id,
            position: Point2::new(r.x, r.y),
            chirality: r.chirality,
            visible: r.lights,
            pending: r.lights,
        }
    }
}

impl From<RobotState> for RobotRecord {
    fn from(r: RobotState) -> Self {
        RobotRecord {
            id: r.id,
            x: r.position.x,
            y: r.position.y,
            chirality: r.chirality,
            lights: r.visible,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalConfiguration {
    pub round: u64,
    pub range: RangeModel,
    pub robots: Vec<RobotState>,
}

impl GlobalConfiguration {
    /// Builds a round-0 configuration; robot `i` gets identifier `i`.
    pub fn new(positions: &[Point2], chiralities: &[Chirality], range: RangeModel) -> Result<Self> {
        if positions.len() != chiralities.len() {
            return Err(Error::InvalidParameter(format!(
                "{} positions but {} chiralities",
                positions.len(),
                chiralities.len()
            )));
        }
        let robots = positions
            .iter()
            .zip(chiralities)
            .enumerate()
            .map(|(id, (&p, &c))| RobotState::new(id, p, c))
            .collect();
        let config = GlobalConfiguration {
            round: 0,
            range,
            robots,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_uniform_chirality(positions: &[Point2], range: RangeModel) -> Result<Self> {
        Self::new(positions, &vec![Chirality::Positive; positions.len()], range)
    }

    /// Checks identifiers, finiteness and light validity.
    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.robots.iter().enumerate() {
            if r.id != i {
                return Err(Error::InvalidParameter(format!(
                    "robot at index {i} has identifier {}",
                    r.id
                )));
            }
            if !r.position.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "robot {i} has a non-finite position"
                )));
            }
            if !r.visible.is_valid() || !r.pending.is_valid() {
                return Err(Error::InvalidParameter(format!(
                    "robot {i} has an invalid light state"
                )));
            }
        }
        Ok(())
    }

    /// The round-0 requirements: distinct positions and a connected graph.
    pub fn validate_initial(&self) -> Result<()> {
        self.validate()?;
        if let Some(&(i, j)) = geometry::coincident_pairs(&self.positions()).first() {
            return Err(Error::InvalidParameter(format!(
                "robots {i} and {j} share a position"
            )));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected(self.range.kind.to_string()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.robots.len()
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.robots.iter().map(|r| r.position).collect()
    }

    pub fn lights(&self) -> Vec<LightState> {
        self.robots.iter().map(|r| r.visible).collect()
    }

    pub fn robot(&self, id: usize) -> Result<&RobotState> {
        self.robots.get(id).ok_or(Error::UnknownRobot(id))
    }

    pub fn graph(&self) -> AdjacencyGraph {
        geometry::neighbors(&self.positions(), &self.range)
    }

    pub fn is_connected(&self) -> bool {
        geometry::is_connected(&self.graph())
    }

    pub fn set_pending(&mut self, id: usize, lights: LightState) -> Result<()> {
        let robot = self.robots.get_mut(id).ok_or(Error::UnknownRobot(id))?;
        robot.pending = lights;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: usize,
    /// Position relative to the observer, in the observer's frame.
    pub offset: Point2,
    pub lights: LightState,
}

/// What one robot sees during Look. Neighbors are sorted by identifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSnapshot {
    pub observer: usize,
    pub neighbors: Vec<Neighbor>,
}

fn closest_by<'a>(
    it: impl Iterator<Item = &'a Neighbor>,
    key: impl Fn(&Neighbor) -> f64,
) -> Option<&'a Neighbor> {
    // Neighbors are id-sorted, so the strict comparison keeps the lowest id on ties.
    let mut best: Option<&Neighbor> = None;
    for nb in it {
        match best {
            Some(b) if key(nb) >= key(b) => {}
            _ => best = Some(nb),
        }
    }
    best
}

impl LocalSnapshot {
    pub fn new(observer: usize, mut neighbors: Vec<Neighbor>) -> Self {
        neighbors.sort_by_key(|nb| nb.id);
        LocalSnapshot {
            observer,
            neighbors,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// Largest local x in the neighborhood, the observer included.
    pub fn x_right(&self) -> f64 {
        self.neighbors.iter().fold(0.0, |m, nb| m.max(nb.offset.x))
    }

    pub fn x_left(&self) -> f64 {
        self.neighbors.iter().fold(0.0, |m, nb| m.min(nb.offset.x))
    }

    pub fn is_rightmost(&self) -> bool {
        self.neighbors.iter().all(|nb| nb.offset.x <= TAU_GEO)
    }

    pub fn is_leftmost(&self) -> bool {
        self.neighbors.iter().all(|nb| nb.offset.x >= -TAU_GEO)
    }

    /// Every neighbor lies on the observer's local y-axis.
    pub fn all_on_y_axis(&self) -> bool {
        self.neighbors.iter().all(|nb| nb.offset.x.abs() <= TAU_GEO)
    }

    /// Closest neighbor strictly above; `None` means the observer is topmost.
    pub fn above(&self) -> Option<&Neighbor> {
        closest_by(
            self.neighbors.iter().filter(|nb| nb.offset.y > TAU_GEO),
            |nb| nb.offset.y,
        )
    }

    pub fn below(&self) -> Option<&Neighbor> {
        closest_by(
            self.neighbors.iter().filter(|nb| nb.offset.y < -TAU_GEO),
            |nb| -nb.offset.y,
        )
    }

    pub fn farthest_above(&self) -> Option<&Neighbor> {
        closest_by(
            self.neighbors.iter().filter(|nb| nb.offset.y > TAU_GEO),
            |nb| -nb.offset.y,
        )
    }

    pub fn farthest_below(&self) -> Option<&Neighbor> {
        closest_by(
            self.neighbors.iter().filter(|nb| nb.offset.y < -TAU_GEO),
            |nb| nb.offset.y,
        )
    }

    /// Local y of the closest robot above, 0 when there is none.
    pub fn y_plus(&self) -> f64 {
        self.above().map_or(0.0, |nb| nb.offset.y)
    }

    pub fn y_minus(&self) -> f64 {
        self.below().map_or(0.0, |nb| nb.offset.y)
    }

    /// Local x-coordinates of the robots on the observer's local x-axis,
    /// the observer included, as `(x, id)` sorted by x then id.
    pub fn y_set(&self) -> Vec<(f64, usize)> {
        let mut set: Vec<(f64, usize)> = self
            .neighbors
            .iter()
            .filter(|nb| nb.offset.y.abs() <= TAU_GEO)
            .map(|nb| (nb.offset.x, nb.id))
            .chain(std::iter::once((0.0, self.observer)))
            .collect();
        set.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        set
    }

    /// 1-based position of the observer within [`Self::y_set`].
    pub fn y_set_rank(&self) -> usize {
        self.y_set()
            .iter()
            .position(|&(_, id)| id == self.observer)
            .map_or(1, |p| p + 1)
    }

    /// Neighbors sharing the observer's x or the leftmost x.
    pub fn c_set(&self) -> Vec<&Neighbor> {
        let xl = self.x_left();
        self.neighbors
            .iter()
            .filter(|nb| nb.offset.x.abs() <= TAU_GEO || (nb.offset.x - xl).abs() <= TAU_GEO)
            .collect()
    }

    fn smallest_positive_y<'a>(it: impl Iterator<Item = &'a Neighbor>) -> f64 {
        it.map(|nb| nb.offset.y)
            .filter(|&y| y > TAU_GEO)
            .fold(None, |m: Option<f64>, y| Some(m.map_or(y, |m| m.min(y))))
            .unwrap_or(DEFAULT_Y_MIN)
    }

    /// Smallest positive local y over [`Self::c_set`].
    pub fn y_min_c_set(&self) -> f64 {
        Self::smallest_positive_y(self.c_set().into_iter())
    }

    /// Smallest positive local y over all neighbors.
    pub fn y_min_all(&self) -> f64 {
        Self::smallest_positive_y(self.neighbors.iter())
    }

    /// Whether a robot (the observer included) sits at `p` up to [`TAU_GEO`].
    pub fn is_occupied(&self, p: Point2) -> bool {
        p.approx_eq(Point2::ORIGIN) || self.neighbors.iter().any(|nb| nb.offset.approx_eq(p))
    }
}

/// The local view of `robot`: offsets `(x_j - x_i, chirality_i * (y_j - y_i))`
/// and the neighbors' visible lights.
pub fn take_snapshot(config: &GlobalConfiguration, robot: usize) -> Result<LocalSnapshot> {
    let me = config.robot(robot)?;
    let neighbors = config
        .robots
        .iter()
        .filter(|r| r.id != robot && config.range.contains(r.position - me.position))
        .map(|r| Neighbor {
            id: r.id,
            offset: me.to_local(r.position),
            lights: r.visible,
        })
        .collect();
    Ok(LocalSnapshot::new(robot, neighbors))
}

/// Moves every active robot to its global target at once, commits the
/// pending lights of active robots and advances the round.
pub fn apply_moves(
    config: &GlobalConfiguration,
    targets: &BTreeMap<usize, Point2>,
    active: &ActivationRecord,
) -> Result<GlobalConfiguration> {
    for &id in targets.keys() {
        if id >= config.n() {
            return Err(Error::UnknownRobot(id));
        }
        if !active.contains(id) {
            return Err(Error::TargetForInactive(id));
        }
    }
    let mut next = config.clone();
    for &id in &active.active {
        let target = *targets.get(&id).ok_or(Error::MissingTarget(id))?;
        if !target.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "robot {id} computed a non-finite target"
            )));
        }
        let robot = &mut next.robots[id];
        robot.position = target;
        robot.visible = robot.pending;
    }
    next.round += 1;
    Ok(next)
}
