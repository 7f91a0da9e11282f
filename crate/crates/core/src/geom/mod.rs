//! Euclidean primitives in `R^d`: balls, scenes, directions and the
//! projection of a scene onto the hyperplane orthogonal to a direction.

mod generate;
mod minimax;
pub mod sphere;
pub mod vec;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TransversalError};

pub use generate::{random_disjoint_scene, GeneratedScene, SceneRequest};
pub use minimax::{disks_common_point, CommonPoint, MinimaxOptions, DEFAULT_MINIMAX_TOL};

/// Tie tolerance for order keys, relative to the scene diameter.
pub const DEFAULT_TIE_FACTOR: f64 = 1e-9;

/// Closed ball with center `c` and radius `r`; `s = r^2` is derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(TransversalError::InvalidBall {
                index: 0,
                reason: format!("radius must be positive and finite, got {radius}"),
            });
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(TransversalError::InvalidBall {
                index: 0,
                reason: "center has non-finite coordinates".into(),
            });
        }
        Ok(Self { center, radius })
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn squared_radius(&self) -> f64 {
        self.radius * self.radius
    }

    /// Distance between centers minus the radius sum; positive iff disjoint.
    pub fn gap(&self, other: &Ball) -> f64 {
        vec::dist(&self.center, &other.center) - (self.radius + other.radius)
    }
}

/// Ordered family of balls; the order is the prescribed intersection order.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    dimension: usize,
    balls: Vec<Ball>,
    allow_overlap: bool,
}

impl Scene {
    /// Builds a scene of pairwise strictly disjoint balls.
    pub fn new(dimension: usize, balls: Vec<Ball>) -> Result<Self> {
        Self::build(dimension, balls, false)
    }

    /// Builds a scene without the disjointness check. Used for the tangent
    /// and overlapping configurations that show what fails without it.
    pub fn new_allow_overlap(dimension: usize, balls: Vec<Ball>) -> Result<Self> {
        Self::build(dimension, balls, true)
    }

    fn build(dimension: usize, balls: Vec<Ball>, allow_overlap: bool) -> Result<Self> {
        if dimension < 2 {
            return Err(TransversalError::InvalidParameter(format!(
                "scene dimension must be at least 2, got {dimension}"
            )));
        }
        for (index, b) in balls.iter().enumerate() {
            if b.dimension() != dimension {
                return Err(TransversalError::DimensionMismatch {
                    expected: dimension,
                    found: b.dimension(),
                });
            }
            if !(b.radius > 0.0) || !b.radius.is_finite() || b.center.iter().any(|c| !c.is_finite()) {
                return Err(TransversalError::InvalidBall {
                    index,
                    reason: "radius must be positive and coordinates finite".into(),
                });
            }
        }
        if !allow_overlap {
            for i in 0..balls.len() {
                for j in i + 1..balls.len() {
                    let distance = vec::dist(&balls[i].center, &balls[j].center);
                    let radius_sum = balls[i].radius + balls[j].radius;
                    if distance <= radius_sum {
                        return Err(TransversalError::Overlap {
                            i,
                            j,
                            distance,
                            radius_sum,
                        });
                    }
                }
            }
        }
        Ok(Self {
            dimension,
            balls,
            allow_overlap,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn allows_overlap(&self) -> bool {
        self.allow_overlap
    }

    /// Sub-scene keeping the given indices in the given order.
    pub fn subscene(&self, indices: &[usize]) -> Scene {
        Scene {
            dimension: self.dimension,
            balls: indices.iter().map(|&i| self.balls[i].clone()).collect(),
            allow_overlap: self.allow_overlap,
        }
    }

    /// Largest distance between two points of the union of balls.
    pub fn diameter(&self) -> f64 {
        let mut best = self.balls.iter().map(|b| 2.0 * b.radius).fold(0.0, f64::max);
        for i in 0..self.balls.len() {
            for j in i + 1..self.balls.len() {
                let d = vec::dist(&self.balls[i].center, &self.balls[j].center)
                    + self.balls[i].radius
                    + self.balls[j].radius;
                best = best.max(d);
            }
        }
        best
    }

    /// Smallest pairwise gap (negative when some pair overlaps).
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.balls.len() {
            for j in i + 1..self.balls.len() {
                best = best.min(self.balls[i].gap(&self.balls[j]));
            }
        }
        best
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SceneFile::from(self)).expect("scene serializes")
    }

    /// Parses the scene JSON format, reporting line and column on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| TransversalError::SceneParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_scene()
    }
}

/// On-disk scene layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub dimension: usize,
    #[serde(default = "default_true")]
    pub order_is_significant: bool,
    pub balls: Vec<Ball>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_overlap: bool,
}

fn default_true() -> bool {
    true
}

impl From<&Scene> for SceneFile {
    fn from(scene: &Scene) -> Self {
        Self {
            dimension: scene.dimension,
            order_is_significant: true,
            balls: scene.balls.clone(),
            allow_overlap: scene.allow_overlap,
        }
    }
}

impl SceneFile {
    pub fn into_scene(self) -> Result<Scene> {
        Scene::build(self.dimension, self.balls, self.allow_overlap)
    }
}

/// Unit vector on `S^{d-1}`. Orientation is significant; use
/// [`Direction::antipode`] to flip it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction(Vec<f64>);

impl Direction {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(components: Vec<f64>) -> Result<Self> {
        let n = vec::norm(&components);
        if !(n > 0.0) || !n.is_finite() {
            return Err(TransversalError::ZeroDirection);
        }
        Ok(Self(components.into_iter().map(|c| c / n).collect()))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn antipode(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// Angle to `other` on the sphere, in radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        vec::angle(&self.0, &other.0)
    }

    /// Angle between the lines spanned by `self` and `other`.
    pub fn projective_angle_to(&self, other: &Direction) -> f64 {
        let a = self.angle_to(other);
        a.min(std::f64::consts::PI - a)
    }

    pub fn is_unit(&self) -> bool {
        (vec::norm(&self.0) - 1.0).abs() <= Self::NORM_TOL
    }
}

/// A ball projected onto `u^⊥`, in the basis of [`orthogonal_basis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedDisk {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Orthonormal basis of `u^⊥`: Gram-Schmidt on the standard basis with the
/// axis of largest `|u_k|` dropped.
pub fn orthogonal_basis(u: &Direction) -> Vec<Vec<f64>> {
    let d = u.dimension();
    let comps = u.components();
    let drop = (0..d)
        .max_by(|&a, &b| comps[a].abs().total_cmp(&comps[b].abs()))
        .expect("nonempty direction");
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in (0..d).filter(|&k| k != drop) {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        // Two passes keep the basis orthogonal to u to machine precision.
        for _ in 0..2 {
            let c = vec::dot(&e, comps);
            vec::axpy(&mut e, -c, comps);
            for b in &basis {
                let c = vec::dot(&e, b);
                vec::axpy(&mut e, -c, b);
            }
        }
        let n = vec::norm(&e);
        basis.push(e.into_iter().map(|x| x / n).collect());
    }
    basis
}

/// Orthogonal projection of every ball onto `u^⊥`.
pub fn project_to_orthogonal_plane(scene: &Scene, u: &Direction) -> Result<Vec<ProjectedDisk>> {
    if u.dimension() != scene.dimension() {
        return Err(TransversalError::DimensionMismatch {
            expected: scene.dimension(),
            found: u.dimension(),
        });
    }
    let basis = orthogonal_basis(u);
    Ok(scene
        .balls()
        .iter()
        .map(|b| ProjectedDisk {
            center: basis.iter().map(|e| vec::dot(&b.center, e)).collect(),
            radius: b.radius,
        })
        .collect())
}

/// Order in which a transversal with direction `u` meets the balls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderOutcome {
    Strict(Vec<usize>),
    /// Two order keys are within the tie tolerance; no order is claimed.
    Tie { first: usize, second: usize },
}

impl OrderOutcome {
    pub fn strict(&self) -> Option<&[usize]> {
        match self {
            OrderOutcome::Strict(o) => Some(o),
            OrderOutcome::Tie { .. } => None,
        }
    }
}

/// Indices sorted by `<c_i, u>`.
///
/// Along any line meeting pairwise disjoint balls the chords are disjoint and
/// their midpoints are the projections of the centers, so this is the order of
/// every transversal with direction `u`.
pub fn transversal_order(scene: &Scene, u: &Direction, tie_tol: Option<f64>) -> OrderOutcome {
    let tol = tie_tol.unwrap_or_else(|| DEFAULT_TIE_FACTOR * scene.diameter());
    let keys: Vec<f64> = scene
        .balls()
        .iter()
        .map(|b| vec::dot(&b.center, u.components()))
        .collect();
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    for w in idx.windows(2) {
        if keys[w[1]] - keys[w[0]] < tol {
            return OrderOutcome::Tie {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            };
        }
    }
    OrderOutcome::Strict(idx)
}

/// Structural flags of a scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneFlags {
    /// Every center distance is at least twice the sum of the two radii.
    pub thinly_distributed: bool,
    /// Every squared center distance is at least twice the sum of squared radii.
    pub pairwise_inflatable: bool,
    pub collinear_centers: bool,
    pub pairwise_disjoint: bool,
}

pub fn scene_classification(scene: &Scene) -> SceneFlags {
    let balls = scene.balls();
    let mut thin = true;
    let mut inflatable = true;
    let mut disjoint = true;
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let d2 = vec::dist2(&balls[i].center, &balls[j].center);
            let rs = balls[i].radius + balls[j].radius;
            thin &= d2.sqrt() >= 2.0 * rs;
            inflatable &= d2 >= 2.0 * (balls[i].squared_radius() + balls[j].squared_radius());
            disjoint &= d2.sqrt() > rs;
        }
    }
    SceneFlags {
        thinly_distributed: thin,
        pairwise_inflatable: inflatable,
        collinear_centers: affine_rank(scene, 1e-9) <= 1,
        pairwise_disjoint: disjoint,
    }
}

/// Dimension of the affine span of the centers, with singular values below
/// `rel_tol * largest` treated as zero.
pub fn affine_rank(scene: &Scene, rel_tol: f64) -> usize {
    let balls = scene.balls();
    if balls.len() <= 1 {
        return 0;
    }
    let d = scene.dimension();
    let rows = balls.len() - 1;
    let m = nalgebra::DMatrix::from_fn(rows, d, |i, j| balls[i + 1].center[j] - balls[0].center[j]);
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}
