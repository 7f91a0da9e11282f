//! The direction-sextic of three balls in `R^3`.
//!
//! With edge vectors `e_ij = c_j - c_i`, `δ_ij = <e_ij, e_ij>`, `q = <u, u>`
//! and `t_ij = δ_ij q - <e_ij, u>^2`, the directions `u` of common tangent
//! lines to three spheres are the zeros of the bordered determinant
//!
//! ```text
//!         | 0   1     1     1     1   |
//!         | 1   0    q s0  q s1  q s2 |
//! σ(u) =  | 1  q s0   0    t01   t02  |
//!         | 1  q s1  t01    0    t12  |
//!         | 1  q s2  t02   t12    0   |
//! ```
//!
//! a homogeneous form of degree 6 in `u`.

mod tangent;
pub mod trace;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TransversalError};
use crate::geom::{vec, Ball, Scene};
use crate::poly::{cofactor_det, det3, Scalar, TernaryPoly};

pub use tangent::{tangent_lines_for_direction, Line, TangentSolution, ON_SEXTIC_TOL};
pub use trace::{trace_curves, Chart, ChartKind, CurveTrace, TraceSet};

/// Three balls in `R^3`.
#[derive(Debug)]
pub struct Triple {
    centers: [[f64; 3]; 3],
    radii: [f64; 3],
    allow_overlap: bool,
    expansion: OnceLock<Expansion>,
}

impl Clone for Triple {
    fn clone(&self) -> Self {
        Self {
            centers: self.centers,
            radii: self.radii,
            allow_overlap: self.allow_overlap,
            expansion: self.expansion.clone(),
        }
    }
}

impl PartialEq for Triple {
    fn eq(&self, other: &Self) -> bool {
        self.centers == other.centers && self.radii == other.radii && self.allow_overlap == other.allow_overlap
    }
}

#[derive(Clone, Debug)]
struct Expansion {
    sigma: TernaryPoly<f64>,
    second: [[TernaryPoly<f64>; 3]; 3],
    coeff_norm: f64,
}

impl Triple {
    pub fn new(centers: [[f64; 3]; 3], radii: [f64; 3]) -> Result<Self> {
        Self::build(centers, radii, false)
    }

    /// Skips the disjointness check (tangent and overlapping reproductions).
    pub fn new_allow_overlap(centers: [[f64; 3]; 3], radii: [f64; 3]) -> Result<Self> {
        Self::build(centers, radii, true)
    }

    fn build(centers: [[f64; 3]; 3], radii: [f64; 3], allow_overlap: bool) -> Result<Self> {
        let balls = (0..3)
            .map(|k| Ball::new(centers[k].to_vec(), radii[k]))
            .collect::<Result<Vec<_>>>()?;
        if allow_overlap {
            Scene::new_allow_overlap(3, balls)?;
        } else {
            Scene::new(3, balls)?;
        }
        Ok(Self {
            centers,
            radii,
            allow_overlap,
            expansion: OnceLock::new(),
        })
    }

    /// Triple of a three-ball scene in `R^3`.
    pub fn from_scene(scene: &Scene) -> Result<Self> {
        if scene.dimension() != 3 || scene.len() != 3 {
            return Err(TransversalError::InvalidParameter(format!(
                "a triple needs 3 balls in R^3, got {} balls in R^{}",
                scene.len(),
                scene.dimension()
            )));
        }
        let b = scene.balls();
        let c = |k: usize| [b[k].center[0], b[k].center[1], b[k].center[2]];
        Self::build([c(0), c(1), c(2)], [b[0].radius, b[1].radius, b[2].radius], scene.allows_overlap())
    }

    pub fn to_scene(&self) -> Scene {
        let balls = (0..3)
            .map(|k| Ball {
                center: self.centers[k].to_vec(),
                radius: self.radii[k],
            })
            .collect();
        if self.allow_overlap {
            Scene::new_allow_overlap(3, balls).expect("validated")
        } else {
            Scene::new(3, balls).expect("validated")
        }
    }

    pub fn centers(&self) -> &[[f64; 3]; 3] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64; 3] {
        &self.radii
    }

    pub fn squared_radii(&self) -> [f64; 3] {
        self.radii.map(|r| r * r)
    }

    pub fn allows_overlap(&self) -> bool {
        self.allow_overlap
    }

    /// `e_ij = c_j - c_i`.
    pub fn edge(&self, i: usize, j: usize) -> [f64; 3] {
        vec::sub3(&self.centers[j], &self.centers[i])
    }

    /// `δ_ij = |c_j - c_i|^2`.
    pub fn edge_sq(&self, i: usize, j: usize) -> f64 {
        let e = self.edge(i, j);
        vec::dot3(&e, &e)
    }

    /// Centers are (numerically) collinear.
    pub fn collinear(&self) -> bool {
        let n = vec::cross3(&self.edge(0, 1), &self.edge(0, 2));
        let scale = self.edge_sq(0, 1).max(self.edge_sq(0, 2));
        vec::dot3(&n, &n).sqrt() <= 1e-10 * scale
    }

    /// Balls relabeled by `perm` (new ball `k` is old ball `perm[k]`).
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self {
            centers: perm.map(|k| self.centers[k]),
            radii: perm.map(|k| self.radii[k]),
            allow_overlap: self.allow_overlap,
            expansion: OnceLock::new(),
        }
    }

    fn expansion(&self) -> &Expansion {
        self.expansion.get_or_init(|| {
            let sigma = sigma_polynomial(&self.centers, &self.squared_radii());
            let d: Vec<TernaryPoly<f64>> = (0..3).map(|i| sigma.derivative(i)).collect();
            let second = [0, 1, 2].map(|i| [0, 1, 2].map(|j| d[i].derivative(j)));
            let coeff_norm = sigma.terms().map(|(_, c)| c.abs()).sum();
            Expansion {
                sigma,
                second,
                coeff_norm,
            }
        })
    }

    /// `σ` as an explicit degree-6 form.
    pub fn sigma_poly(&self) -> DirectionPoly {
        DirectionPoly {
            poly: self.expansion().sigma.clone(),
            degree: 6,
        }
    }

    /// Sum of absolute coefficients of `σ`; a scale for "is zero" tests at
    /// unit directions.
    pub fn sigma_scale(&self) -> f64 {
        self.expansion().coeff_norm
    }

    /// The Hessian determinant as an explicit degree-12 form.
    pub fn hessian_poly(&self) -> DirectionPoly {
        let s = &self.expansion().second;
        let m: Vec<Vec<TernaryPoly<f64>>> = s.iter().map(|row| row.to_vec()).collect();
        DirectionPoly {
            poly: cofactor_det(&m, &TernaryPoly::zero(), |p| p.is_zero()),
            degree: 12,
        }
    }
}

/// Homogeneous form in `u = (u1, u2, u3)` with a declared degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionPoly {
    pub poly: TernaryPoly<f64>,
    pub degree: u32,
}

impl DirectionPoly {
    pub fn eval(&self, u: &[f64; 3]) -> f64 {
        self.poly.eval(u)
    }

    /// Checks `p(λu) = λ^deg p(u)` at one point, relative to `|p(λu)|`.
    pub fn check_homogeneity(&self, u: &[f64; 3], lambda: f64, rel_tol: f64) -> bool {
        let lhs = self.poly.eval(&u.map(|x| lambda * x));
        let rhs = lambda.powi(self.degree as i32) * self.poly.eval(u);
        (lhs - rhs).abs() <= rel_tol * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
    }
}

/// The 5x5 Cayley matrix with entries given by `q s_k` and `t_ij` values.
fn cayley_matrix<T: Clone>(zero: T, one: T, qs: [T; 3], t01: T, t02: T, t12: T) -> [[T; 5]; 5] {
    let (z, o) = (zero, one);
    [
        [z.clone(), o.clone(), o.clone(), o.clone(), o.clone()],
        [o.clone(), z.clone(), qs[0].clone(), qs[1].clone(), qs[2].clone()],
        [o.clone(), qs[0].clone(), z.clone(), t01.clone(), t02.clone()],
        [o.clone(), qs[1].clone(), t01, z.clone(), t12.clone()],
        [o, qs[2].clone(), t02, t12, z],
    ]
}

/// Full expansion of `σ` into monomials of `u`, over any scalar field.
pub fn sigma_polynomial<T: Scalar>(centers: &[[T; 3]; 3], squared_radii: &[T; 3]) -> TernaryPoly<T> {
    let q = TernaryPoly::<T>::squared_norm_form();
    let t = |i: usize, j: usize| {
        let e: [T; 3] = [0, 1, 2].map(|k| centers[j][k].clone() - centers[i][k].clone());
        let delta = e.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
        let lin = TernaryPoly::linear(e);
        &q.scale(&delta) - &(&lin * &lin)
    };
    let qs = [0, 1, 2].map(|k| q.scale(&squared_radii[k]));
    let m: Vec<Vec<TernaryPoly<T>>> = cayley_matrix(
        TernaryPoly::zero(),
        TernaryPoly::constant(T::one()),
        qs,
        t(0, 1),
        t(0, 2),
        t(1, 2),
    )
    .into_iter()
    .map(|row| row.to_vec())
    .collect();
    cofactor_det(&m, &TernaryPoly::zero(), |p| p.is_zero())
}

/// `σ(u)` from the numeric 5x5 determinant; `u` need not be normalized.
pub fn eval_sigma(triple: &Triple, u: &[f64; 3]) -> f64 {
    let q = vec::dot3(u, u);
    let s = triple.squared_radii();
    let t = |i: usize, j: usize| {
        let e = triple.edge(i, j);
        let c = vec::cross3(&e, u);
        vec::dot3(&c, &c)
    };
    let m = cayley_matrix(0.0, 1.0, [q * s[0], q * s[1], q * s[2]], t(0, 1), t(0, 2), t(1, 2));
    det5(m)
}

/// `σ(u)` from the expanded coefficients.
pub fn eval_sigma_expanded(triple: &Triple, u: &[f64; 3]) -> f64 {
    triple.expansion().sigma.eval(u)
}

/// Determinant of the matrix of second partials of `σ` at `u`.
pub fn eval_hessian_sigma(triple: &Triple, u: &[f64; 3]) -> f64 {
    det3(&hessian_matrix(triple, u))
}

pub fn hessian_matrix(triple: &Triple, u: &[f64; 3]) -> [[f64; 3]; 3] {
    let s = &triple.expansion().second;
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| s[i][j].eval(u)))
}

/// Gradient of `σ` at `u`.
pub fn sigma_gradient(triple: &Triple, u: &[f64; 3]) -> [f64; 3] {
    let sigma = &triple.expansion().sigma;
    [0, 1, 2].map(|i| sigma.derivative(i).eval(u))
}

fn det5(mut m: [[f64; 5]; 5]) -> f64 {
    let mut det = 1.0;
    for col in 0..5 {
        let piv = (col..5)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("range");
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..5 {
            let f = m[row][col] / m[col][col];
            for k in col..5 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Symmetric form `M` on directions; the conic is `u^T M u = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormOnDirections {
    pub matrix: [[f64; 3]; 3],
    /// Counts of positive, negative and zero eigenvalues.
    pub signature: (usize, usize, usize),
    /// The pair overlaps: every direction admits a transversal and the conic
    /// bounds nothing.
    pub degenerate: bool,
}

impl QuadraticFormOnDirections {
    pub fn eval(&self, u: &[f64; 3]) -> f64 {
        let m = &self.matrix;
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += u[i] * m[i][j] * u[j];
            }
        }
        acc
    }
}

/// Boundary conic of the direction cone of a pair of balls.
///
/// `u^T M u = t_ij - (r_i + r_j)^2 q`: a direction admits a transversal of the
/// pair iff the projected centers are at most `r_i + r_j` apart, i.e. iff the
/// form is non-positive. The zero set is traced by the inner special
/// bitangents.
pub fn pair_cone_quadratic(ball_i: &Ball, ball_j: &Ball) -> Result<QuadraticFormOnDirections> {
    if ball_i.dimension() != 3 || ball_j.dimension() != 3 {
        return Err(TransversalError::DimensionMismatch {
            expected: 3,
            found: ball_i.dimension().max(ball_j.dimension()),
        });
    }
    let e = vec::sub(&ball_j.center, &ball_i.center);
    let delta = vec::dot(&e, &e);
    let rs = ball_i.radius + ball_j.radius;
    let diag = delta - rs * rs;
    let mut matrix = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            matrix[a][b] = if a == b { diag } else { 0.0 } - e[a] * e[b];
        }
    }
    // eigenvalues: diag (twice, on e^⊥) and diag - delta = -rs^2 (along e)
    let eig = [diag, diag, -rs * rs];
    let tol = 1e-12 * delta.max(rs * rs);
    let signature = (
        eig.iter().filter(|&&x| x > tol).count(),
        eig.iter().filter(|&&x| x < -tol).count(),
        eig.iter().filter(|&&x| x.abs() <= tol).count(),
    );
    Ok(QuadraticFormOnDirections {
        matrix,
        signature,
        degenerate: diag <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collinear() -> Triple {
        Triple::new([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [8.0, 0.0, 0.0]], [1.0; 3]).unwrap()
    }

    #[test]
    fn axis_direction_is_on_sextic_for_collinear_unit_balls() {
        let t = collinear();
        assert!(eval_sigma(&t, &[1.0, 0.0, 0.0]).abs() < 1e-9);
        assert!(eval_sigma_expanded(&t, &[1.0, 0.0, 0.0]).abs() < 1e-9);
        assert!(eval_sigma(&t, &[0.0, 1.0, 0.0]).abs() > 1.0);
    }

    #[test]
    fn expansion_is_homogeneous_sextic() {
        let t = Triple::new([[0.3, -1.0, 2.0], [4.0, 1.0, 0.5], [1.0, 5.0, -2.0]], [0.7, 1.1, 1.3]).unwrap();
        let p = t.sigma_poly();
        assert!(p.poly.is_homogeneous(6));
        assert!(p.poly.len() <= 28);
        let h = t.hessian_poly();
        assert!(h.poly.is_homogeneous(12));
    }

    #[test]
    fn pair_cone_examples() {
        let a = Ball::new(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let b = Ball::new(vec![4.0, 0.0, 0.0], 1.0).unwrap();
        let m = pair_cone_quadratic(&a, &b).unwrap();
        assert!((m.eval(&[1.0, 0.0, 0.0]) + 4.0).abs() < 1e-12);
        assert!((m.eval(&[0.0, 1.0, 0.0]) - 12.0).abs() < 1e-12);
        assert_eq!(m.signature, (2, 1, 0));
        assert!(!m.degenerate);
        // boundary at u_x^2 = 3/4
        let c = 0.75f64.sqrt();
        assert!(m.eval(&[c, (1.0 - c * c).sqrt(), 0.0]).abs() < 1e-12);

        let over = Ball::new(vec![1.5, 0.0, 0.0], 1.0).unwrap();
        assert!(pair_cone_quadratic(&a, &over).unwrap().degenerate);
    }

    #[test]
    fn det5_matches_cofactor() {
        let m = [
            [0.0, 1.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 2.0, 3.0, 5.0],
            [1.0, 2.0, 0.0, 7.0, 11.0],
            [1.0, 3.0, 7.0, 0.0, 13.0],
            [1.0, 5.0, 11.0, 13.0, 0.0],
        ];
        let v: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
        let c = cofactor_det(&v, &0.0, |x: &f64| *x == 0.0);
        assert!((det5(m) - c).abs() < 1e-9 * c.abs());
    }
}
