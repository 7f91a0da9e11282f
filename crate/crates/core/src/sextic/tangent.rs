//! Affine common tangents of three spheres with a prescribed direction.
//!
//! With `c_0` translated to the origin and `p` the foot of the perpendicular
//! from the origin, a tangent `(p, u)` satisfies
//! `<p, c_i> = a_i / (2 q)` for `i = 1, 2`, `<p, u> = 0` and `<p, p> = s_0`,
//! where `a_i = t_{0i} + (s_0 - s_i) q`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{eval_sigma, Triple};
use crate::error::{Result, TransversalError};
use crate::geom::vec;

/// `|σ(u)|` must not exceed this times the coefficient scale of `σ`.
pub const ON_SEXTIC_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    /// Point of the line closest to `c_0`.
    pub point: [f64; 3],
    /// Unit direction.
    pub direction: [f64; 3],
}

impl Line {
    pub fn distance_to(&self, x: &[f64; 3]) -> f64 {
        let w = vec::sub3(x, &self.point);
        let c = vec::cross3(&w, &self.direction);
        vec::dot3(&c, &c).sqrt()
    }

    pub fn at(&self, s: f64) -> [f64; 3] {
        [0, 1, 2].map(|k| self.point[k] + s * self.direction[k])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TangentSolution {
    /// Zero, one or two tritangents.
    Lines(Vec<Line>),
    /// Collinear centers with `u` along their line: every line with
    /// direction `u` at distance `radius` from the axis is tangent.
    Circle {
        axis_point: [f64; 3],
        axis: [f64; 3],
        radius: f64,
    },
}

impl TangentSolution {
    pub fn lines(&self) -> &[Line] {
        match self {
            TangentSolution::Lines(l) => l,
            TangentSolution::Circle { .. } => &[],
        }
    }
}

/// `a_i = t_{0i} + (s_0 - s_i) q` of the tangent system (unit `u`).
pub fn tangent_a(triple: &Triple, i: usize, u: &[f64; 3]) -> f64 {
    let e = triple.edge(0, i);
    let c = vec::cross3(&e, u);
    let s = triple.squared_radii();
    vec::dot3(&c, &c) + (s[0] - s[i]) * vec::dot3(u, u)
}

pub fn tangent_lines_for_direction(triple: &Triple, u: &[f64; 3]) -> Result<TangentSolution> {
    let n = vec::dot3(u, u).sqrt();
    if !(n > 0.0) {
        return Err(TransversalError::ZeroDirection);
    }
    let u = u.map(|x| x / n);
    let sigma = eval_sigma(triple, &u);
    let tolerance = ON_SEXTIC_TOL * triple.sigma_scale();
    if sigma.abs() > tolerance {
        return Err(TransversalError::NotOnSextic {
            value: sigma.abs(),
            tolerance,
        });
    }
    let c0 = triple.centers()[0];
    let s0 = triple.squared_radii()[0];
    let r0 = triple.radii()[0];
    let e1 = triple.edge(0, 1);
    let e2 = triple.edge(0, 2);
    let m = Matrix3::new(e1[0], e1[1], e1[2], e2[0], e2[1], e2[2], u[0], u[1], u[2]);
    let rhs = Vector3::new(0.5 * tangent_a(triple, 1, &u), 0.5 * tangent_a(triple, 2, &u), 0.0);

    let svd = m.svd(true, true);
    let (uu, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let sv = svd.singular_values;
    let largest = sv.max();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * largest).count();
    let scale = s0.max(vec::dot3(&e1, &e1)).max(vec::dot3(&e2, &e2));

    let to_world = |p: Vector3<f64>| Line {
        point: [c0[0] + p[0], c0[1] + p[1], c0[2] + p[2]],
        direction: u,
    };

    match rank {
        3 => {
            let p = m.lu().solve(&rhs).expect("full rank");
            let mismatch = (p.dot(&p) - s0).abs();
            let lines = if mismatch <= 1e-6 * scale {
                vec![to_world(p)]
            } else {
                Vec::new()
            };
            Ok(TangentSolution::Lines(lines))
        }
        2 => {
            // particular least-squares solution plus a null direction
            let mut p = Vector3::zeros();
            for k in 0..3 {
                if sv[k] > RANK_TOL * largest {
                    let coef = uu.column(k).dot(&rhs) / sv[k];
                    p += vt.row(k).transpose() * coef;
                }
            }
            let residual = (m * p - rhs).norm();
            if residual > 1e-8 * scale.max(rhs.norm()) {
                return Ok(TangentSolution::Lines(Vec::new()));
            }
            let k_null = (0..3).find(|&k| sv[k] <= RANK_TOL * largest).expect("rank 2");
            let nvec: Vector3<f64> = vt.row(k_null).transpose();
            // |p + λ n|^2 = s0 with |n| = 1
            let b = p.dot(&nvec);
            let c = p.dot(&p) - s0;
            let disc = b * b - c;
            let mut lines = Vec::new();
            if disc >= -1e-10 * scale {
                let sq = disc.max(0.0).sqrt();
                lines.push(to_world(p + nvec * (-b + sq)));
                if sq > 1e-9 * scale.sqrt() {
                    lines.push(to_world(p + nvec * (-b - sq)));
                }
            }
            Ok(TangentSolution::Lines(lines))
        }
        _ => Ok(TangentSolution::Circle {
            axis_point: c0,
            axis: u,
            radius: r0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_axis_direction_gives_circle() {
        let t = Triple::new([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [8.0, 0.0, 0.0]], [1.0; 3]).unwrap();
        match tangent_lines_for_direction(&t, &[1.0, 0.0, 0.0]).unwrap() {
            TangentSolution::Circle { radius, axis, .. } => {
                assert_eq!(radius, 1.0);
                assert_eq!(axis, [1.0, 0.0, 0.0]);
            }
            other => panic!("expected circle, got {other:?}"),
        }
    }

    #[test]
    fn off_sextic_direction_is_rejected() {
        let t = Triple::new([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [8.0, 0.0, 0.0]], [1.0; 3]).unwrap();
        assert!(matches!(
            tangent_lines_for_direction(&t, &[0.0, 1.0, 0.0]),
            Err(TransversalError::NotOnSextic { .. })
        ));
    }

    #[test]
    fn planar_pinned_tangent_is_recovered() {
        // three discs in z = 0 touching the x axis, the middle one from below
        let t = Triple::new([[0.0, 1.0, 0.0], [5.0, -1.5, 0.0], [10.0, 2.0, 0.0]], [1.0, 1.5, 2.0]).unwrap();
        let sol = tangent_lines_for_direction(&t, &[1.0, 0.0, 0.0]).unwrap();
        let lines = sol.lines();
        assert!(!lines.is_empty());
        let hit = lines.iter().any(|l| {
            (0..3).all(|k| (l.distance_to(&t.centers()[k]) - t.radii()[k]).abs() < 1e-9)
        });
        assert!(hit, "{lines:?}");
    }
}
