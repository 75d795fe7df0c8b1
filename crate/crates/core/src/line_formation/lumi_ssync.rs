use super::oblot::oblot_phase1;
use super::{away_from, closer, half_away_from, ComputeResult};
use crate::geometry::{Point2, TAU_GEO};
use crate::world::{LightState, LocalSnapshot, Neighbor};

fn plus(c: u8, k: u8) -> u8 {
    (c + k) % 3
}

/// A neighbor that has finished its move and waits for us to take over.
fn offering(nb: &Neighbor, own: LightState) -> bool {
    nb.lights.prev && nb.lights.counter == plus(own.counter, 1)
}

/// A move that shifts the observer towards `other` is only made when the gap
/// on that side is a full unit (or there is no robot there).
fn other_side_is_unit(other: Option<&Neighbor>) -> bool {
    other.is_none_or(|nb| nb.offset.y.abs() >= 1.0 - TAU_GEO)
}

/// Luminous SSYNC Max-Line rule. Runs are handed from robot to robot and
/// synchronised by the counter, which a robot advances when it completes or
/// absorbs a run, or when it detects that its color is out of step.
pub fn lumi_ssync_compute(snap: &LocalSnapshot, own: LightState) -> ComputeResult {
    if !snap.all_on_y_axis() {
        let mut lights = own;
        lights.mov = false;
        lights.prev = false;
        return ComputeResult::new(oblot_phase1(snap).unwrap_or(Point2::ORIGIN), lights);
    }
    let up = snap.above();
    let down = snap.below();
    let mut lights = own;
    let mut y = 0.0;

    if own.mov {
        lights.mov = false;
        lights.prev = true;
        lights.counter = plus(own.counter, 1);
        let up_mov = up.filter(|nb| nb.lights.mov);
        let down_mov = down.filter(|nb| nb.lights.mov);
        match (up_mov, down_mov) {
            (Some(m), None) if other_side_is_unit(down) => y = half_away_from(m.offset.y),
            (None, Some(m)) if other_side_is_unit(up) => y = half_away_from(m.offset.y),
            (None, None) => {
                let tie = matches!((up, down), (Some(a), Some(b))
                    if (a.offset.y.abs() - b.offset.y.abs()).abs() <= TAU_GEO);
                if let (false, Some(rc)) = (tie, closer(up, down)) {
                    let other = if up.is_some_and(|a| a.id == rc.id) { down } else { up };
                    if other_side_is_unit(other) {
                        y = away_from(rc.offset.y, 1.0);
                    }
                }
            }
            _ => {}
        }
    } else if own.prev {
        let behind = |nb: Option<&Neighbor>| {
            nb.is_some_and(|nb| nb.lights.counter == plus(own.counter, 2))
        };
        if !behind(up) && !behind(down) {
            lights.prev = false;
        }
    } else {
        let quiet_same = |nb: &Neighbor| nb.lights.quiescent() && nb.lights.counter == own.counter;
        match (up, down) {
            (None, None) => {}
            (Some(f), None) | (None, Some(f)) => {
                if offering(f, own) {
                    lights.counter = plus(own.counter, 1);
                } else if quiet_same(f) {
                    lights.mov = true;
                } else if f.lights.quiescent() {
                    lights.counter = plus(own.counter, 1);
                }
            }
            (Some(a), Some(b)) => match (offering(a, own), offering(b, own)) {
                (true, true) => lights.counter = plus(own.counter, 1),
                (true, false) | (false, true) => {
                    let far = if offering(a, own) { b } else { a };
                    if quiet_same(far) {
                        lights.mov = true;
                    } else if far.lights.quiescent() {
                        lights.counter = plus(own.counter, 1);
                    }
                }
                (false, false) => {}
            },
        }
    }
    ComputeResult::new(Point2::new(0.0, y), lights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_formation::test_util::*;

    #[test]
    fn endpoint_arms_then_moves() {
        let s = snap(&[(0.0, 0.4, dark())]);
        let armed = lumi_ssync_compute(&s, dark());
        assert_eq!(armed.lights, lit(0, true, false));
        assert!(close(armed.target, 0.0, 0.0));
        let moved = lumi_ssync_compute(&s, armed.lights);
        assert_eq!(moved.lights, lit(1, false, true));
        assert!(close(moved.target, 0.0, -0.6));
    }

    #[test]
    fn out_of_step_successor_bumps_counter() {
        // Offer from above, the robot below is already on the next color.
        let s = snap(&[(0.0, 1.0, lit(1, false, true)), (0.0, -0.5, lit(1, false, false))]);
        let r = lumi_ssync_compute(&s, dark());
        assert!(close(r.target, 0.0, 0.0));
        assert_eq!(r.lights, lit(1, false, false));
    }

    #[test]
    fn quiescent_interior_without_run_does_nothing() {
        let s = snap(&[(0.0, 0.5, dark()), (0.0, -0.5, dark())]);
        let r = lumi_ssync_compute(&s, dark());
        assert_eq!(r.lights, dark());
        assert!(close(r.target, 0.0, 0.0));
    }

    #[test]
    fn takes_over_a_run() {
        let s = snap(&[(0.0, 1.0, lit(1, false, true)), (0.0, -0.5, dark())]);
        assert_eq!(lumi_ssync_compute(&s, dark()).lights, lit(0, true, false));
        let r = lumi_ssync_compute(&s, lit(0, true, false));
        assert!(close(r.target, 0.0, 0.5));
        assert_eq!(r.lights, lit(1, false, true));
    }

    #[test]
    fn prev_cleared_once_successor_catches_up() {
        let waiting = snap(&[(0.0, -0.5, dark())]);
        assert!(lumi_ssync_compute(&waiting, lit(1, false, true)).lights.prev);
        let done = snap(&[(0.0, -0.5, lit(1, false, true))]);
        assert_eq!(lumi_ssync_compute(&done, lit(1, false, true)).lights, lit(1, false, false));
    }

    #[test]
    fn off_axis_uses_collapse_rule() {
        let s = snap(&[(-0.5, 0.3, lit(0, true, false))]);
        let r = lumi_ssync_compute(&s, lit(2, false, true));
        assert!(close(r.target, -0.5, 0.0));
        assert_eq!(r.lights, lit(2, false, false));
    }
}
