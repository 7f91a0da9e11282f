//! Which tritangents bound a direction cone, and pinned planar triples.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{disks_common_point, project_to_orthogonal_plane, vec, Direction, MinimaxOptions};
use crate::sextic::{tangent_lines_for_direction, Line, TangentSolution, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineCase {
    /// The line meets the plane of the centers in one point.
    Transverse,
    /// Parallel to the plane of the centers, off the plane.
    ParallelOffPlane,
    /// Contained in the plane of the centers.
    InPlane,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TritangentClass {
    pub line: Line,
    pub case: LineCase,
    /// Barycentric coordinates of the crossing with the center plane
    /// (transverse lines only).
    pub barycentric: Option<[f64; 3]>,
    pub crosses_triangle: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryClassification {
    pub direction: [f64; 3],
    pub tritangents: Vec<TritangentClass>,
    /// Boundary by the crossing criterion: tritangents exist and every one
    /// of them crosses the triangle of centers.
    pub predicted_boundary: bool,
    /// Optimal slack of the projected disks at the direction.
    pub slack: f64,
    /// Boundary by direct test: no line with this direction meets all open
    /// balls.
    pub empirical_boundary: bool,
    /// A line with this direction through all three open balls, when one
    /// exists.
    pub stabbing_line: Option<Line>,
    pub consistent: bool,
    /// Set when the classification does not apply.
    pub skipped: Option<String>,
}

/// Slack above `-EMPIRICAL_TOL * max radius` counts as boundary.
const EMPIRICAL_TOL: f64 = 1e-6;
const CROSS_TOL: f64 = 1e-9;

pub fn classify_boundary_direction(triple: &Triple, u: &[f64; 3]) -> Result<BoundaryClassification> {
    let dir = Direction::new(u.to_vec())?;
    let unit: [f64; 3] = [dir.components()[0], dir.components()[1], dir.components()[2]];
    let scene = triple.to_scene();
    let disks = project_to_orthogonal_plane(&scene, &dir)?;
    let cp = disks_common_point(&disks, &MinimaxOptions::default())?;
    let rmax = triple.radii().iter().copied().fold(0.0, f64::max);
    let empirical_boundary = cp.slack >= -EMPIRICAL_TOL * rmax;
    let stabbing_line = (!empirical_boundary).then(|| {
        let basis = crate::geom::orthogonal_basis(&dir);
        let mut p = [0.0; 3];
        for (e, x) in basis.iter().zip(&cp.point) {
            for k in 0..3 {
                p[k] += x * e[k];
            }
        }
        Line { point: p, direction: unit }
    });

    let mut out = BoundaryClassification {
        direction: unit,
        tritangents: Vec::new(),
        predicted_boundary: false,
        slack: cp.slack,
        empirical_boundary,
        stabbing_line,
        consistent: true,
        skipped: None,
    };
    if triple.collinear() {
        out.skipped = Some("collinear centers: the center plane is undefined".into());
        return Ok(out);
    }
    let lines = match tangent_lines_for_direction(triple, &unit)? {
        TangentSolution::Lines(l) => l,
        TangentSolution::Circle { .. } => {
            out.skipped = Some("a circle of tangents".into());
            return Ok(out);
        }
    };
    let c = triple.centers();
    let normal = vec::cross3(&triple.edge(0, 1), &triple.edge(0, 2));
    let nn = vec::dot3(&normal, &normal).sqrt();
    let normal = normal.map(|x| x / nn);
    let scale = triple.edge_sq(0, 1).max(triple.edge_sq(0, 2)).max(triple.edge_sq(1, 2)).sqrt();

    for line in lines {
        let s = vec::dot3(&unit, &normal);
        let off = vec::dot3(&vec::sub3(&line.point, &c[0]), &normal);
        let class = if s.abs() > CROSS_TOL {
            let t = -off / s;
            let x = line.at(t);
            let bary = barycentric(c, &normal, &x);
            TritangentClass {
                line,
                case: LineCase::Transverse,
                barycentric: Some(bary),
                crosses_triangle: bary.iter().all(|&b| b >= -CROSS_TOL),
            }
        } else if off.abs() > CROSS_TOL * scale {
            TritangentClass {
                line,
                case: LineCase::ParallelOffPlane,
                barycentric: None,
                crosses_triangle: false,
            }
        } else {
            // in-plane: the line separates the vertices iff it crosses
            let m = vec::cross3(&normal, &unit);
            let sides: Vec<f64> = c.iter().map(|ck| vec::dot3(&vec::sub3(ck, &line.point), &m)).collect();
            let pos = sides.iter().any(|&x| x > 0.0);
            let neg = sides.iter().any(|&x| x < 0.0);
            TritangentClass {
                line,
                case: LineCase::InPlane,
                barycentric: None,
                crosses_triangle: pos && neg,
            }
        };
        out.tritangents.push(class);
    }
    out.predicted_boundary = !out.tritangents.is_empty() && out.tritangents.iter().all(|t| t.crosses_triangle);
    out.consistent = out.predicted_boundary == out.empirical_boundary;
    Ok(out)
}

fn barycentric(c: &[[f64; 3]; 3], normal: &[f64; 3], x: &[f64; 3]) -> [f64; 3] {
    let area = |a: &[f64; 3], b: &[f64; 3], p: &[f64; 3]| {
        vec::dot3(&vec::cross3(&vec::sub3(b, a), &vec::sub3(p, a)), normal)
    };
    let total = area(&c[0], &c[1], &c[2]);
    [
        area(&c[1], &c[2], x) / total,
        area(&c[2], &c[0], x) / total,
        area(&c[0], &c[1], x) / total,
    ]
}

/// The common tangent line in the center plane that has one ball on the
/// opposite side from the other two and meets that ball between them.
/// Returns the line and the order in which it meets the balls.
pub fn pinned_planar_tangent(triple: &Triple) -> Option<(Line, [usize; 3])> {
    if triple.collinear() {
        return None;
    }
    let c = triple.centers();
    let r = triple.radii();
    let e1 = triple.edge(0, 1);
    let n1 = vec::dot3(&e1, &e1).sqrt();
    let e1 = e1.map(|x| x / n1);
    let w = triple.edge(0, 2);
    let along = vec::dot3(&w, &e1);
    let e2 = [0, 1, 2].map(|k| w[k] - along * e1[k]);
    let n2 = vec::dot3(&e2, &e2).sqrt();
    let e2 = e2.map(|x| x / n2);
    let xy: Vec<[f64; 2]> = c
        .iter()
        .map(|ck| {
            let d = vec::sub3(ck, &c[0]);
            [vec::dot3(&d, &e1), vec::dot3(&d, &e2)]
        })
        .collect();

    for middle in 0..3 {
        let eps: Vec<f64> = (0..3).map(|k| if k == middle { -1.0 } else { 1.0 }).collect();
        // <n, x_k - x_0> = eps_k r_k - eps_0 r_0 for k = 1, 2
        let a = [
            [xy[1][0] - xy[0][0], xy[1][1] - xy[0][1]],
            [xy[2][0] - xy[0][0], xy[2][1] - xy[0][1]],
        ];
        let b = [eps[1] * r[1] - eps[0] * r[0], eps[2] * r[2] - eps[0] * r[0]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() < 1e-14 {
            continue;
        }
        let n = [
            (b[0] * a[1][1] - a[0][1] * b[1]) / det,
            (a[0][0] * b[1] - b[0] * a[1][0]) / det,
        ];
        let norm = n[0].hypot(n[1]);
        if (norm - 1.0).abs() > 1e-9 {
            continue;
        }
        let n = [n[0] / norm, n[1] / norm];
        let h = n[0] * xy[0][0] + n[1] * xy[0][1] - eps[0] * r[0];
        let t = [-n[1], n[0]];
        let key: Vec<f64> = xy.iter().map(|p| t[0] * p[0] + t[1] * p[1]).collect();
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| key[i].total_cmp(&key[j]));
        if order[1] != middle {
            continue;
        }
        let foot = [n[0] * h, n[1] * h];
        let point = [0, 1, 2].map(|k| c[0][k] + foot[0] * e1[k] + foot[1] * e2[k]);
        let direction = [0, 1, 2].map(|k| t[0] * e1[k] + t[1] * e2[k]);
        return Some((Line { point, direction }, order));
    }
    None
}

/// Does the triple admit a pinned in-plane common tangent?
pub fn is_pinned_planar(triple: &Triple) -> bool {
    pinned_planar_tangent(triple).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pinned() -> Triple {
        Triple::new([[0.0, 1.0, 0.0], [5.0, -1.5, 0.0], [10.0, 2.0, 0.0]], [1.0, 1.5, 2.0]).unwrap()
    }

    #[test]
    fn pinned_tangent_found() {
        let (line, order) = pinned_planar_tangent(&pinned()).unwrap();
        assert!(line.direction[1].abs() < 1e-12 && line.direction[2].abs() < 1e-12);
        assert_eq!(order[1], 1);
        for k in 0..3 {
            assert!((line.distance_to(&pinned().centers()[k]) - pinned().radii()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn same_side_tangent_is_not_pinned() {
        let t = Triple::new([[0.0, 1.0, 0.0], [5.0, 1.5, 0.0], [10.0, 2.0, 0.0]], [1.0, 1.5, 2.0]).unwrap();
        assert!(!is_pinned_planar(&t));
    }

    #[test]
    fn pinned_direction_is_boundary() {
        let c = classify_boundary_direction(&pinned(), &[1.0, 0.0, 0.0]).unwrap();
        assert!(c.empirical_boundary, "{c:?}");
        assert!(c.predicted_boundary, "{c:?}");
        assert!(c.consistent);
    }
}
