//! Oblivious Gathering with one-axis agreement under FSYNC.

use crate::geometry::{Point2, TAU_GEO};
use crate::line_formation::ComputeResult;
use crate::world::LocalSnapshot;

/// Collapse leftwards onto a vertical line, then squeeze the line: each robot
/// goes to the midpoint of its farthest neighbors above and below.
pub fn gathering_compute(snap: &LocalSnapshot) -> ComputeResult {
    if snap.neighbors.iter().all(|nb| nb.offset.chebyshev() <= TAU_GEO) {
        return ComputeResult::oblivious(Point2::ORIGIN);
    }
    let x = snap.x_right() - 1.0;
    if !snap.all_on_y_axis() {
        return ComputeResult::oblivious(Point2::new(x, 0.0));
    }
    let ya = snap.farthest_above().map_or(0.0, |nb| nb.offset.y);
    let yb = snap.farthest_below().map_or(0.0, |nb| nb.offset.y);
    ComputeResult::oblivious(Point2::new(x, 0.5 * ya + 0.5 * yb))
}
