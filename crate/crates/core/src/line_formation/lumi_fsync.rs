use super::{away_from, closer, half_away_from, ComputeResult};
use crate::geometry::{Point2, TAU_GEO};
use crate::world::{LightState, LocalSnapshot, Neighbor};

/// Outcome of the vertical run logic, before the counter tick.
pub(crate) struct RunStep {
    pub y: f64,
    pub lights: LightState,
    /// Two runs met here, at a neighboring pair or from both sides.
    pub met: bool,
}

/// Vertical part of the synchronous run protocol. Assumes every neighbor in
/// `snap` lies on the local y-axis.
pub(crate) fn run_step(snap: &LocalSnapshot, own: LightState) -> RunStep {
    let mut lights = own;
    let up = snap.above();
    let down = snap.below();
    let mut y = 0.0;
    let mut met = false;

    if up.is_none() || down.is_none() {
        let rc = up.or(down);
        if own.mov {
            lights.mov = false;
            lights.prev = true;
            if let Some(rc) = rc {
                if rc.lights.mov {
                    y = half_away_from(rc.offset.y);
                    met = true;
                } else {
                    y = away_from(rc.offset.y, 1.0);
                }
            }
        } else if own.counter == 2 {
            lights.mov = true;
            lights.prev = false;
        }
    } else if own.mov {
        lights.mov = false;
        lights.prev = true;
        let movers = [up, down].map(|nb| nb.filter(|nb| nb.lights.mov));
        if movers.iter().all(Option::is_none) {
            let ahead = [up, down].map(|nb| nb.filter(|nb| !nb.lights.prev));
            // Runs arriving from both sides at once also count as a meeting.
            let rc = closer(ahead[0], ahead[1]).or_else(|| {
                let stale = stale_side(up, down);
                met = stale.is_none();
                stale
            });
            if let Some(rc) = rc {
                y = away_from(rc.offset.y, 1.0);
            }
        } else if let Some(rc) = closer(movers[0], movers[1]) {
            y = half_away_from(rc.offset.y);
            met = true;
        }
    } else if up.is_some_and(|nb| nb.lights.mov) || down.is_some_and(|nb| nb.lights.mov) {
        if own.prev {
            lights.prev = false;
        } else {
            lights.mov = true;
        }
    }
    RunStep { y, lights, met }
}

/// Both neighbors show `prev`, so one of them is left over from an earlier
/// run. The one that just handed over the run sits exactly one unit away;
/// the run heads for the other.
fn stale_side<'a>(up: Option<&'a Neighbor>, down: Option<&'a Neighbor>) -> Option<&'a Neighbor> {
    let unit = |nb: &Neighbor| (nb.offset.y.abs() - 1.0).abs() <= TAU_GEO;
    match (up, down) {
        (Some(a), Some(b)) if unit(a) && !unit(b) => Some(b),
        (Some(a), Some(b)) if unit(b) && !unit(a) => Some(a),
        _ => None,
    }
}

/// Horizontal spreading step used while the neighborhood is not a vertical
/// line: move to one unit left of the rightmost neighbor, at a height unique
/// among the robots on the local x-axis.
pub(crate) fn spread_step(snap: &LocalSnapshot, own: LightState) -> ComputeResult {
    let mut lights = own;
    lights.mov = false;
    lights.prev = false;
    let size = snap.y_set().len() as f64;
    let rank = snap.y_set_rank() as f64;
    let y = (rank - 1.0) / size * snap.y_min_all() / 3.0;
    ComputeResult::new(Point2::new(snap.x_right() - 1.0, y), lights.incremented())
}

/// Luminous FSYNC Max-Line rule; the formed line keeps drifting left.
pub fn lumi_fsync_compute(snap: &LocalSnapshot, own: LightState) -> ComputeResult {
    if !snap.all_on_y_axis() {
        return spread_step(snap, own);
    }
    let step = run_step(snap, own);
    ComputeResult::new(
        Point2::new(snap.x_right() - 1.0, step.y),
        step.lights.incremented(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_formation::test_util::*;

    #[test]
    fn spreading_rank_one_stays_on_axis() {
        let s = snap(&[(0.5, 0.0, dark()), (0.3, 0.4, dark())]);
        let r = lumi_fsync_compute(&s, lit(0, true, false));
        assert!(close(r.target, -0.5, 0.0));
        assert!(!r.lights.mov && !r.lights.prev);
        assert_eq!(r.lights.counter, 1);
    }

    #[test]
    fn spreading_rank_two_lifts() {
        let s = snap(&[(-0.5, 0.0, dark()), (0.3, 0.6, dark())]);
        let r = lumi_fsync_compute(&s, dark());
        assert!(close(r.target, -0.7, 0.5 * 0.6 / 3.0));
    }

    #[test]
    fn two_robot_meeting_ends_unit_apart() {
        let s = snap(&[(0.0, -0.4, lit(0, true, false))]);
        let r = lumi_fsync_compute(&s, lit(0, true, false));
        assert!(close(r.target, -1.0, 0.3));
        assert!(r.lights.prev && !r.lights.mov);
        // The partner, seeing us at +0.4, goes to -0.3: 0.4 + 0.3 + 0.3 = 1.
        let t = lumi_fsync_compute(&snap(&[(0.0, 0.4, lit(0, true, false))]), lit(0, true, false));
        assert!(close(t.target, -1.0, -0.3));
    }

    #[test]
    fn run_passes_a_stale_prev() {
        // The run arrives from above (unit gap); the robot below still shows
        // prev from the previous meeting.
        let s = snap(&[(0.0, 1.0, lit(0, false, true)), (0.0, -0.75, lit(0, false, true))]);
        let r = lumi_fsync_compute(&s, lit(0, true, false));
        assert!(close(r.target, -1.0, 0.25));
        assert!(r.lights.prev && !r.lights.mov);
    }

    #[test]
    fn idle_tick_drifts_left() {
        let s = snap(&[(0.0, 0.5, dark()), (0.0, -0.5, dark())]);
        let r = lumi_fsync_compute(&s, lit(1, false, false));
        assert!(close(r.target, -1.0, 0.0));
        assert_eq!(r.lights, lit(2, false, false));
    }

    #[test]
    fn endpoint_arms_on_counter_two() {
        let s = snap(&[(0.0, 0.5, dark())]);
        let r = lumi_fsync_compute(&s, lit(2, false, true));
        assert_eq!(r.lights, lit(0, true, false));
        assert!(close(r.target, -1.0, 0.0));
    }

    #[test]
    fn endpoint_run_moves_unit_from_neighbor() {
        let s = snap(&[(0.0, 0.3, dark())]);
        let r = lumi_fsync_compute(&s, lit(0, true, false));
        assert!(close(r.target, -1.0, -0.7));
        assert_eq!(r.lights, lit(1, false, true));
    }

    #[test]
    fn interior_takes_over_and_moves_away_from_next() {
        // Run arrives from above (prev), next robot below is dark.
        let above = lit(1, false, true);
        let s = snap(&[(0.0, 1.0, above), (0.0, -0.4, dark())]);
        let r = lumi_fsync_compute(&s, lit(1, true, false));
        assert!(close(r.target, -1.0, 0.6));
        // Seeing a mov neighbor with no own prev arms the robot.
        let s = snap(&[(0.0, 1.0, lit(0, true, false)), (0.0, -0.4, dark())]);
        assert!(lumi_fsync_compute(&s, lit(0, false, false)).lights.mov);
        // With own prev set, it clears prev instead.
        let s = snap(&[(0.0, 1.0, dark()), (0.0, -0.4, lit(0, true, false))]);
        assert_eq!(lumi_fsync_compute(&s, lit(0, false, true)).lights, lit(1, false, false));
    }
}
