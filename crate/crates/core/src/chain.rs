//! Go-to-the-middle dynamics for Chain-Formation with stationary outer robots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, TAU_GEO};
use crate::scheduler::ActivationRecord;

/// A disoriented local frame: rotation by `rotation` radians, then an
/// optional reflection of the local y-axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainFrame {
    pub rotation: f64,
    pub reflect: bool,
}

impl ChainFrame {
    pub fn to_local(&self, v: Point2) -> Point2 {
        let (s, c) = (-self.rotation).sin_cos();
        let r = Point2::new(c * v.x - s * v.y, s * v.x + c * v.y);
        if self.reflect {
            Point2::new(r.x, -r.y)
        } else {
            r
        }
    }

    pub fn to_global(&self, v: Point2) -> Point2 {
        let v = if self.reflect { Point2::new(v.x, -v.y) } else { v };
        let (s, c) = self.rotation.sin_cos();
        Point2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn of(self, p: Point2) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

/// Robots `0..=n+1` in chain order; the first and last never move.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfiguration {
    pub positions: Vec<Point2>,
    pub frames: Vec<ChainFrame>,
    pub round: u64,
}

impl ChainConfiguration {
    pub fn new(positions: Vec<Point2>) -> Result<Self> {
        let frames = vec![ChainFrame::default(); positions.len()];
        Self::with_frames(positions, frames)
    }

    pub fn with_frames(positions: Vec<Point2>, frames: Vec<ChainFrame>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidParameter(
                "a chain needs its two outer robots".into(),
            ));
        }
        if frames.len() != positions.len() {
            return Err(Error::InvalidParameter("one frame per chain robot".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("non-finite chain position".into()));
        }
        Ok(ChainConfiguration {
            positions,
            frames,
            round: 0,
        })
    }

    /// Number of inner robots.
    pub fn n(&self) -> usize {
        self.positions.len() - 2
    }

    pub fn links(&self) -> Vec<Point2> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_link(&self) -> f64 {
        self.links().iter().fold(0.0, |m, w| m.max(w.norm()))
    }

    /// The two chain neighbors of inner robot `i` in its own frame.
    pub fn snapshot(&self, i: usize) -> Result<[Point2; 2]> {
        self.check_inner(i)?;
        let frame = self.frames[i];
        let me = self.positions[i];
        Ok([
            frame.to_local(self.positions[i - 1] - me),
            frame.to_local(self.positions[i + 1] - me),
        ])
    }

    fn check_inner(&self, i: usize) -> Result<()> {
        if i >= self.positions.len() {
            return Err(Error::UnknownRobot(i));
        }
        if i == 0 || i == self.positions.len() - 1 {
            return Err(Error::OuterRobot(i));
        }
        Ok(())
    }
}

/// Global target of inner robot `i`: the midpoint of its chain neighbors,
/// computed in its local frame.
pub fn gtm_target(chain: &ChainConfiguration, i: usize) -> Result<Point2> {
    let [prev, next] = chain.snapshot(i)?;
    let local = prev.midpoint(next);
    Ok(chain.positions[i] + chain.frames[i].to_global(local))
}

/// One synchronous step: every active inner robot moves to its midpoint.
pub fn gtm_step(chain: &ChainConfiguration, active: &ActivationRecord) -> Result<ChainConfiguration> {
    let mut next = chain.clone();
    for &i in &active.active {
        next.positions[i] = gtm_target(chain, i)?;
    }
    next.round += 1;
    Ok(next)
}

/// Σ (w_i − mean)² over the link vectors' `axis` components.
pub fn phi2(chain: &ChainConfiguration, axis: Axis) -> f64 {
    let w: Vec<f64> = chain.links().iter().map(|&p| axis.of(p)).collect();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    w.iter().map(|v| (v - mean).powi(2)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainMetrics {
    pub w: Vec<Point2>,
    /// Total chain length.
    pub length: f64,
    /// Distance between the outer robots.
    pub span: f64,
    pub w_inf: Point2,
    /// Largest deviation of a link from `w_inf`.
    pub max_deviation: f64,
}

impl ChainMetrics {
    pub fn of(chain: &ChainConfiguration) -> Self {
        let w = chain.links();
        let first = chain.positions[0];
        let last = *chain.positions.last().expect("chain has outer robots");
        let w_inf = (last - first) * (1.0 / w.len() as f64);
        ChainMetrics {
            length: w.iter().map(|v| v.norm()).sum(),
            span: (last - first).norm(),
            max_deviation: w.iter().fold(0.0, |m, &v| m.max((v - w_inf).norm())),
            w,
            w_inf,
        }
    }

    pub fn eps_reached(&self, eps: f64) -> bool {
        self.max_deviation <= eps
    }
}

/// A random chain of `n` inner robots with links in `[0.1, 1]`, random
/// frames, deterministic in `seed`.
pub fn random_chain(n: usize, seed: u64) -> ChainConfiguration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = vec![Point2::ORIGIN];
    let mut heading: f64 = 0.0;
    for _ in 0..=n {
        heading += rng.random_range(-1.5..1.5);
        let len = rng.random_range(0.1..=1.0);
        let last = *positions.last().expect("non-empty");
        positions.push(last + Point2::new(heading.cos(), heading.sin()) * len);
    }
    let frames = (0..n + 2)
        .map(|_| ChainFrame {
            rotation: rng.random_range(0.0..std::f64::consts::TAU),
            reflect: rng.random_bool(0.5),
        })
        .collect();
    ChainConfiguration::with_frames(positions, frames).expect("generated chain is valid")
}

/// True when every link has length at most 1 (up to tolerance).
pub fn links_connected(chain: &ChainConfiguration) -> bool {
    chain.max_link() <= 1.0 + TAU_GEO
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> ChainConfiguration {
        ChainConfiguration::new(xs.iter().map(|&x| Point2::new(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn fsync_step_example() {
        let c = line(&[0.0, 0.2, 0.4, 1.0]);
        let next = gtm_step(&c, &ActivationRecord::new(0, vec![1, 2])).unwrap();
        assert!((next.positions[1].x - 0.2).abs() < 1e-12);
        assert!((next.positions[2].x - 0.6).abs() < 1e-12);
        assert_eq!(next.positions[3], c.positions[3]);
    }

    #[test]
    fn single_active_robot() {
        let c = line(&[0.0, 0.2, 0.4, 1.0]);
        let next = gtm_step(&c, &ActivationRecord::new(0, vec![1])).unwrap();
        assert_eq!(next.positions[2], c.positions[2]);
        assert!((next.positions[1].x - 0.2).abs() < 1e-12);
    }

    #[test]
    fn outer_robots_refuse() {
        let c = line(&[0.0, 0.5, 1.0]);
        assert!(matches!(gtm_target(&c, 0), Err(Error::OuterRobot(0))));
        assert!(matches!(gtm_target(&c, 2), Err(Error::OuterRobot(2))));
    }

    #[test]
    fn phi2_example() {
        let c = line(&[0.0, 0.2, 0.4, 1.0]);
        let third = 1.0 / 3.0;
        let expected = 2.0 * (0.2 - third) * (0.2 - third) + (0.6 - third) * (0.6 - third);
        assert!((phi2(&c, Axis::X) - expected).abs() < 1e-12);
        assert!((phi2(&c, Axis::X) - 0.106_666_666_666_666_7).abs() < 1e-9);
        assert_eq!(phi2(&c, Axis::Y), 0.0);
    }

    #[test]
    fn frames_round_trip() {
        let f = ChainFrame {
            rotation: 1.1,
            reflect: true,
        };
        let v = Point2::new(0.3, -0.7);
        assert!(f.to_global(f.to_local(v)).approx_eq(v));
    }

    #[test]
    fn optimal_chain_is_fixed() {
        let c = line(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = ChainMetrics::of(&c);
        assert!(m.eps_reached(1e-12));
        assert!((m.length - m.span).abs() < 1e-12);
        let next = gtm_step(&c, &ActivationRecord::new(0, vec![1, 2, 3])).unwrap();
        for (a, b) in next.positions.iter().zip(&c.positions) {
            assert!(a.approx_eq(*b));
        }
    }
}
