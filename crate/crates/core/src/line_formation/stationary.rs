use super::lumi_fsync::{run_step, spread_step};
use super::ComputeResult;
use crate::geometry::{Point2, TAU_GEO};
use crate::world::{LightState, LocalSnapshot};

/// Luminous FSYNC rule that stops drifting once runs have met: the meeting
/// robots light `final`, the light spreads to neighbors, final robots stop
/// moving left and pull lagging columns back one unit to the right.
pub fn lumi_fsync_stationary_compute(snap: &LocalSnapshot, own: LightState) -> ComputeResult {
    let final_mode = own.fin || snap.neighbors.iter().any(|nb| nb.lights.fin);
    if !final_mode {
        if !snap.all_on_y_axis() {
            return spread_step(snap, own);
        }
        let step = run_step(snap, own);
        let mut lights = step.lights.incremented();
        lights.fin = step.met;
        return ComputeResult::new(Point2::new(snap.x_right() - 1.0, step.y), lights);
    }

    // Columns at most one unit apart are treated as one line for the vertical logic.
    let aligned = snap.neighbors.iter().all(|nb| {
        let dx = nb.offset.x;
        dx.abs() <= TAU_GEO || (dx.abs() - 1.0).abs() <= TAU_GEO
    });
    let (y, mut lights) = if aligned {
        let mut flat = snap.clone();
        flat.neighbors.iter_mut().for_each(|nb| nb.offset.x = 0.0);
        let step = run_step(&flat, own);
        (step.y, step.lights)
    } else {
        let mut l = own;
        l.mov = false;
        l.prev = false;
        (0.0, l)
    };
    lights.fin = true;

    let step_right = snap.is_leftmost()
        && snap.neighbors.iter().all(|nb| nb.lights.fin)
        && snap
            .neighbors
            .iter()
            .any(|nb| (nb.offset.x - 1.0).abs() <= TAU_GEO);
    let x = if step_right { 1.0 } else { 0.0 };
    ComputeResult::new(Point2::new(x, y), lights.incremented())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_formation::test_util::*;

    fn with_fin(mut l: LightState) -> LightState {
        l.fin = true;
        l
    }

    #[test]
    fn final_robot_stays_put() {
        let s = snap(&[(0.0, 1.0, with_fin(dark())), (0.0, -1.0, dark())]);
        let r = lumi_fsync_stationary_compute(&s, with_fin(lit(1, false, false)));
        assert!(close(r.target, 0.0, 0.0));
        assert!(r.lights.fin);
    }

    #[test]
    fn meeting_robots_light_final() {
        let s = snap(&[(0.0, 1.0, lit(1, false, true)), (0.0, -0.6, lit(1, true, false))]);
        let r = lumi_fsync_stationary_compute(&s, lit(1, true, false));
        assert!(r.lights.fin);
        assert!(close(r.target, -1.0, 0.2));
    }

    #[test]
    fn seeing_final_spreads_it() {
        let s = snap(&[(0.0, 1.0, with_fin(dark()))]);
        assert!(lumi_fsync_stationary_compute(&s, dark()).lights.fin);
    }

    #[test]
    fn lagging_final_robot_steps_right() {
        let s = snap(&[(1.0, 0.5, with_fin(dark()))]);
        let r = lumi_fsync_stationary_compute(&s, with_fin(lit(1, false, false)));
        assert!(close(r.target, 1.0, 0.0));
    }
}
