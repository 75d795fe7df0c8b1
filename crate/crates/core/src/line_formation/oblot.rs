use super::ComputeResult;
use crate::geometry::{Point2, TAU_GEO};
use crate::world::LocalSnapshot;

/// The horizontal collapse step: a robot that is rightmost but not leftmost
/// moves to the leftmost x, sidestepping upwards if that spot is taken.
/// Returns `None` when the rule does not apply.
pub fn oblot_phase1(snap: &LocalSnapshot) -> Option<Point2> {
    let xl = snap.x_left();
    if !(snap.is_rightmost() && xl < -TAU_GEO) {
        return None;
    }
    let spot = Point2::new(xl, 0.0);
    if snap.is_occupied(spot) {
        Some(Point2::new(xl, snap.y_min_c_set() / 3.0))
    } else {
        Some(spot)
    }
}

/// Oblivious Max-Line rule: collapse horizontally, then stretch the vertical
/// line by midpoint moves with endpoints pulling towards a unit virtual stretch.
pub fn oblot_compute(snap: &LocalSnapshot) -> ComputeResult {
    if let Some(target) = oblot_phase1(snap) {
        return ComputeResult::oblivious(target);
    }
    if !snap.all_on_y_axis() {
        return ComputeResult::oblivious(Point2::ORIGIN);
    }
    let y = match (snap.above(), snap.below()) {
        (None, Some(b)) => 0.5 * (b.offset.y + 1.0),
        (Some(a), None) => 0.5 * (a.offset.y - 1.0),
        (Some(a), Some(b)) => 0.5 * (a.offset.y + b.offset.y),
        (None, None) => 0.0,
    };
    ComputeResult::oblivious(Point2::new(0.0, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_formation::test_util::*;

    fn target(nbs: &[(f64, f64)]) -> Point2 {
        let nbs: Vec<_> = nbs.iter().map(|&(x, y)| (x, y, dark())).collect();
        oblot_compute(&snap(&nbs)).target
    }

    #[test]
    fn free_leftmost_spot() {
        assert!(close(target(&[(-0.5, 0.3)]), -0.5, 0.0));
    }

    #[test]
    fn occupied_spot_sidesteps_by_a_third_of_default() {
        assert!(close(target(&[(-0.5, 0.0)]), -0.5, 1.0 / 30.0));
    }

    #[test]
    fn occupied_spot_uses_c_set_minimum() {
        // (-0.5, 0.6) is in the leftmost column, (-0.2, 0.1) is not.
        let t = target(&[(-0.5, 0.0), (-0.5, 0.6), (-0.2, 0.1)]);
        assert!(close(t, -0.5, 0.2));
    }

    #[test]
    fn collinear_interior_goes_to_midpoint() {
        assert!(close(target(&[(0.0, 0.6), (0.0, -0.2)]), 0.0, 0.2));
    }

    #[test]
    fn collinear_topmost_uses_virtual_robot() {
        assert!(close(target(&[(0.0, -0.5)]), 0.0, 0.25));
        assert!(close(target(&[(0.0, 0.5)]), 0.0, -0.25));
    }

    #[test]
    fn not_rightmost_stays() {
        assert!(close(target(&[(0.5, 0.3), (-0.5, 0.0)]), 0.0, 0.0));
        assert!(close(target(&[]), 0.0, 0.0));
    }
}
