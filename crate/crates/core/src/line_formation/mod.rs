//! Compute rules for Max-Line-Formation. Every rule maps a snapshot and the
//! robot's own lights to a local-frame target and the lights for next round.

mod lumi_fsync;
mod lumi_ssync;
mod oblot;
mod stationary;

pub use lumi_fsync::lumi_fsync_compute;
pub use lumi_ssync::lumi_ssync_compute;
pub use oblot::{oblot_compute, oblot_phase1};
pub use stationary::lumi_fsync_stationary_compute;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::world::{LightState, Neighbor};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeResult {
    /// Target in the robot's local frame; the origin means stay.
    pub target: Point2,
    pub lights: LightState,
}

impl ComputeResult {
    pub fn new(target: Point2, lights: LightState) -> Self {
        ComputeResult { target, lights }
    }

    /// A result for light-less robots.
    pub fn oblivious(target: Point2) -> Self {
        ComputeResult {
            target,
            lights: LightState::default(),
        }
    }
}

/// Local y at distance `dist` from a robot at local y `y_c`, on the far side
/// of the observer.
pub(crate) fn away_from(y_c: f64, dist: f64) -> f64 {
    y_c - y_c.signum() * dist
}

/// Local y at distance ½ from the midpoint towards the observer, so that two
/// robots doing this at once end up exactly 1 apart.
pub(crate) fn half_away_from(y_c: f64) -> f64 {
    0.5 * y_c - 0.5 * y_c.signum()
}

/// The closer of two optional line neighbors; ties go to the lower id.
pub(crate) fn closer<'a>(a: Option<&'a Neighbor>, b: Option<&'a Neighbor>) -> Option<&'a Neighbor> {
    match (a, b) {
        (Some(a), Some(b)) => {
            let (da, db) = (a.offset.y.abs(), b.offset.y.abs());
            if da < db || (da == db && a.id < b.id) {
                Some(a)
            } else {
                Some(b)
            }
        }
        (a, None) => a,
        (None, b) => b,
    }
}

#[cfg(test)]
pub(crate) mod test_util {
    use crate::geometry::Point2;
    use crate::world::{LightState, LocalSnapshot, Neighbor};

    /// Snapshot with neighbors `(x, y, lights)`, identifiers 1.. in order.
    pub fn snap(nbs: &[(f64, f64, LightState)]) -> LocalSnapshot {
        LocalSnapshot::new(
            0,
            nbs.iter()
                .enumerate()
                .map(|(i, &(x, y, lights))| Neighbor {
                    id: i + 1,
                    offset: Point2::new(x, y),
                    lights,
                })
                .collect(),
        )
    }

    pub fn dark() -> LightState {
        LightState::default()
    }

    pub fn lit(counter: u8, mov: bool, prev: bool) -> LightState {
        LightState {
            counter,
            mov,
            prev,
            fin: false,
        }
    }

    pub fn close(a: Point2, x: f64, y: f64) -> bool {
        (a.x - x).abs() < 1e-12 && (a.y - y).abs() < 1e-12
    }
}
