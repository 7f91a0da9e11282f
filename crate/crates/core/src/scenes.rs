//! Fixed scenes used by examples, tests and figure output.

use crate::geom::{Ball, Scene};
use crate::sextic::Triple;

/// Three coplanar balls whose in-plane common tangent, the x axis, has the
/// middle ball on the other side: the only line transversal in the order
/// `0, 1, 2` has direction `(1, 0, 0)`.
pub fn pinned_triple() -> Triple {
    Triple::new([[0.0, 1.0, 0.0], [5.0, -1.5, 0.0], [10.0, 2.0, 0.0]], [1.0, 1.5, 2.0]).expect("disjoint")
}

pub const PINNED_DIRECTION: [f64; 3] = [1.0, 0.0, 0.0];

/// Gaps between `B_0` and `B_1` for the disjoint, tangent and overlapping
/// panels of the transition sweep.
pub const TRANSITION_GAPS: [f64; 3] = [0.05, 0.0, -0.055];
pub const TRANSITION_LABELS: [&str; 3] = ["disjoint", "tangent", "overlapping"];

/// `B_1` slides along the x axis toward `B_0`; `gap` is
/// `|c_0 - c_1| - r_0 - r_1`.  The order `0, 1, 2` loses convexity of its
/// direction cone once the two balls overlap.
pub fn transition_scene(gap: f64) -> Scene {
    let (r0, r1) = (1.0, 1.302);
    let balls = vec![
        Ball::new(vec![0.0, 0.0, 0.0], r0).expect("valid"),
        Ball::new(vec![r0 + r1 + gap, 0.0, 0.0], r1).expect("valid"),
        Ball::new(vec![0.832, -2.293, 1.822], 1.526).expect("valid"),
    ];
    if gap > 0.0 {
        Scene::new(3, balls).expect("disjoint for positive gap")
    } else {
        Scene::new_allow_overlap(3, balls).expect("valid balls")
    }
}

pub fn transition_triple(gap: f64) -> Triple {
    Triple::from_scene(&transition_scene(gap)).expect("three balls in R^3")
}
