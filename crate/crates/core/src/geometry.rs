//! Points, range models and the connectivity graph of a configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for geometric equality that arises from floating-point arithmetic.
pub const TAU_GEO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn chebyshev(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    /// Unit vector in the direction of `self`; the zero vector stays zero.
    pub fn normalized(self) -> Point2 {
        let len = self.norm();
        if len == 0.0 {
            self
        } else {
            self * (1.0 / len)
        }
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        (self + other) * 0.5
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Coincidence up to [`TAU_GEO`] in both coordinates.
    pub fn approx_eq(self, other: Point2) -> bool {
        (self - other).chebyshev() <= TAU_GEO
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeKind {
    Square,
    Circular,
}

impl fmt::Display for RangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RangeKind::Square => f.write_str("square"),
            RangeKind::Circular => f.write_str("circular"),
        }
    }
}

impl std::str::FromStr for RangeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(RangeKind::Square),
            "circular" => Ok(RangeKind::Circular),
            _ => Err(Error::InvalidParameter(format!("unknown range kind `{s}`"))),
        }
    }
}

/// Connectivity and viewing range. Square ranges are Chebyshev balls, circular
/// ranges are Euclidean balls; both include their boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeModel {
    pub kind: RangeKind,
    pub radius: f64,
}

impl RangeModel {
    pub fn new(kind: RangeKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "range radius must be positive, got {radius}"
            )));
        }
        Ok(RangeModel { kind, radius })
    }

    pub const fn square(radius: f64) -> Self {
        RangeModel {
            kind: RangeKind::Square,
            radius,
        }
    }

    pub const fn circular(radius: f64) -> Self {
        RangeModel {
            kind: RangeKind::Circular,
            radius,
        }
    }

    pub fn distance(&self, offset: Point2) -> f64 {
        match self.kind {
            RangeKind::Square => offset.chebyshev(),
            RangeKind::Circular => offset.norm(),
        }
    }

    /// Whether a robot at `offset` from the observer is within range.
    pub fn contains(&self, offset: Point2) -> bool {
        self.distance(offset) <= self.radius + TAU_GEO
    }
}

/// Undirected graph on robots `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl AdjacencyGraph {
    pub fn empty(n: usize) -> Self {
        AdjacencyGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Inserts the unordered edge `{i, j}`; self-loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "edge ({i}, {j}) out of range");
        if i != j {
            self.edges.insert((i.min(j), i.max(j)));
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            lists[i].push(j);
            lists[j].push(i);
        }
        lists
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let lists = self.adjacency_lists();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &lists[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Connectivity graph of a set of positions under `model`.
pub fn neighbors(positions: &[Point2], model: &RangeModel) -> AdjacencyGraph {
    let mut graph = AdjacencyGraph::empty(positions.len());
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            if model.contains(positions[j] - positions[i]) {
                graph.add_edge(i, j);
            }
        }
    }
    graph
}

pub fn is_connected(graph: &AdjacencyGraph) -> bool {
    graph.n <= 1 || graph.components().len() == 1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiameterStats {
    /// Largest pairwise Euclidean distance.
    pub delta: f64,
    pub delta_x: f64,
    pub delta_y: f64,
}

pub fn diameter_stats(positions: &[Point2]) -> DiameterStats {
    let mut stats = DiameterStats::default();
    for (i, &p) in positions.iter().enumerate() {
        for &q in &positions[i + 1..] {
            let d = q - p;
            stats.delta = stats.delta.max(d.norm());
            stats.delta_x = stats.delta_x.max(d.x.abs());
            stats.delta_y = stats.delta_y.max(d.y.abs());
        }
    }
    stats
}

/// Pairs of robots that occupy the same point up to [`TAU_GEO`].
pub fn coincident_pairs(positions: &[Point2]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            if positions[i].approx_eq(positions[j]) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_boundary_is_inclusive() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)];
        assert!(neighbors(&pts, &RangeModel::square(1.0)).has_edge(0, 1));
        assert!(!neighbors(&pts, &RangeModel::circular(1.0)).has_edge(0, 1));
    }

    #[test]
    fn connectivity_small_cases() {
        assert!(is_connected(&AdjacencyGraph::empty(1)));
        let mut g = AdjacencyGraph::empty(3);
        g.add_edge(0, 1);
        assert!(!is_connected(&g));
        g.add_edge(2, 1);
        assert!(is_connected(&g));
    }

    #[test]
    fn diameter_of_345_triangle() {
        assert_eq!(diameter_stats(&[Point2::ORIGIN]), DiameterStats::default());
        let s = diameter_stats(&[Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)]);
        assert_eq!((s.delta, s.delta_x, s.delta_y), (5.0, 3.0, 4.0));
    }

    #[test]
    fn rejects_non_positive_radius() {
        assert!(RangeModel::new(RangeKind::Square, 0.0).is_err());
        assert!(RangeModel::new(RangeKind::Circular, f64::NAN).is_err());
    }
}
