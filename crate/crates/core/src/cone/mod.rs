//! Direction cones of ordered ball families.
//!
//! A direction `u` is realized by an oriented transversal meeting the balls in
//! a given order iff the projections of the balls onto `u^⊥` share a point and
//! the centers project onto `u` in that order.

mod boundary;
mod convexity;
mod permutations;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TransversalError};
use crate::geom::sphere::{apply, quasi_uniform_sphere, random_orthogonal};
use crate::geom::{
    disks_common_point, orthogonal_basis, project_to_orthogonal_plane, transversal_order, vec, Direction,
    MinimaxOptions, OrderOutcome, Scene, DEFAULT_TIE_FACTOR,
};

pub use boundary::{
    classify_boundary_direction, is_pinned_planar, pinned_planar_tangent, BoundaryClassification, LineCase,
    TritangentClass,
};
pub use convexity::{cone_convexity_check, ConvexityOptions, ConvexityReport, MidpointViolation};
pub use permutations::{
    count_components, enumerate_geometric_permutations, ComponentReport, GeometricPermutation, PermutationCatalog,
    COMPONENT_RADIUS_FACTOR,
};
pub use search::{boundary_point, feasible_direction_search, minimize_slack, FeasibleSearchReport};

/// A scene together with a prescribed order of its balls.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedQuery {
    scene: Scene,
    order: Vec<usize>,
    tie_tol: f64,
}

impl OrderedQuery {
    pub fn new(scene: Scene, order: Vec<usize>) -> Result<Self> {
        let n = scene.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(TransversalError::InvalidOrder(format!(
                "order has {} entries for {n} balls",
                order.len()
            )));
        }
        for &i in &order {
            if i >= n || seen[i] {
                return Err(TransversalError::InvalidOrder(format!("{order:?} is not a permutation of 0..{n}")));
            }
            seen[i] = true;
        }
        let tie_tol = DEFAULT_TIE_FACTOR * scene.diameter();
        Ok(Self { scene, order, tie_tol })
    }

    /// The scene's own order `0, 1, ..., n-1`.
    pub fn identity(scene: Scene) -> Self {
        let order = (0..scene.len()).collect();
        Self::new(scene, order).expect("identity is a permutation")
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn tie_tol(&self) -> f64 {
        self.tie_tol
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self {
            scene: self.scene.clone(),
            order,
            tie_tol: self.tie_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// Optimal minimax slack of the projected disks.
    pub slack: f64,
    pub realized_order: OrderOutcome,
    /// A point of the common intersection (or the minimax point), lifted back
    /// to scene coordinates on the hyperplane through the origin.
    pub witness_point: Vec<f64>,
}

impl Feasibility {
    /// The order is a tie: neither feasible nor infeasible in a meaningful
    /// sense.
    pub fn indeterminate(&self) -> bool {
        matches!(self.realized_order, OrderOutcome::Tie { .. })
    }
}

/// Projected-disk feasibility and realized order at `u`, for any order.
pub fn transversal_status(scene: &Scene, u: &Direction, tie_tol: f64, opts: &MinimaxOptions) -> Result<(f64, OrderOutcome, Vec<f64>)> {
    let disks = project_to_orthogonal_plane(scene, u)?;
    let cp = disks_common_point(&disks, opts)?;
    let basis = orthogonal_basis(u);
    let mut witness = vec![0.0; scene.dimension()];
    for (e, x) in basis.iter().zip(&cp.point) {
        vec::axpy(&mut witness, *x, e);
    }
    Ok((cp.slack, transversal_order(scene, u, Some(tie_tol)), witness))
}

/// Is `u` the direction of an oriented transversal meeting the balls in
/// `query.order()`?
pub fn direction_feasible(query: &OrderedQuery, u: &Direction, opts: &MinimaxOptions) -> Result<Feasibility> {
    let (slack, realized_order, witness_point) = transversal_status(&query.scene, u, query.tie_tol, opts)?;
    let order_ok = realized_order.strict() == Some(query.order());
    Ok(Feasibility {
        feasible: order_ok && slack <= opts.tol,
        slack,
        realized_order,
        witness_point,
    })
}

/// One sampled direction of a cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSample {
    pub direction: Direction,
    pub feasible: bool,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSampleSet {
    pub samples: Vec<ConeSample>,
    pub seed: u64,
    pub count: usize,
    pub scheme: String,
}

impl ConeSampleSet {
    pub fn feasible(&self) -> impl Iterator<Item = &ConeSample> {
        self.samples.iter().filter(|s| s.feasible)
    }

    /// `direction,feasible,slack` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("direction,feasible,slack\n");
        for s in &self.samples {
            let d: Vec<String> = s.direction.components().iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("{},{},{}\n", d.join(" "), s.feasible, s.slack));
        }
        out
    }
}

/// Quasi-uniform directions, rotated by a seeded random orthogonal map.
/// Seed 0 keeps the lattice unrotated.
pub fn sample_directions(d: usize, count: usize, seed: u64) -> Vec<Direction> {
    use rand::SeedableRng;
    let base = quasi_uniform_sphere(d, count);
    if seed == 0 {
        return base;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rot = random_orthogonal(&mut rng, d);
    base.into_iter()
        .map(|u| Direction::new(apply(&rot, u.components())).expect("rotation keeps unit length"))
        .collect()
}

/// Feasibility of `query` on a seeded quasi-uniform lattice.
pub fn sample_cone(query: &OrderedQuery, count: usize, seed: u64, opts: &MinimaxOptions) -> Result<ConeSampleSet> {
    let dirs = sample_directions(query.scene.dimension(), count, seed);
    let samples = dirs
        .into_par_iter()
        .map(|u| {
            let f = direction_feasible(query, &u, opts)?;
            Ok(ConeSample {
                direction: u,
                feasible: f.feasible,
                slack: f.slack,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConeSampleSet {
        samples,
        seed,
        count,
        scheme: format!("quasi-uniform S^{} lattice, rotation seed {seed}", query.scene.dimension() - 1),
    })
}

/// Outcome of comparing whole-scene feasibility with feasibility of every
/// ordered triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HellyReport {
    pub directions: usize,
    pub feasible_directions: usize,
    pub discrepancies: Vec<Direction>,
    /// Largest `|scene slack - max triple slack|` seen.
    pub max_slack_gap: f64,
}

/// Checks, per direction, that the scene is feasible for its order exactly
/// when every triple is feasible for the induced order.
pub fn helly_consistency(query: &OrderedQuery, directions: &[Direction], opts: &MinimaxOptions) -> Result<HellyReport> {
    let n = query.scene.len();
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples.push([a, b, c]);
            }
        }
    }
    // each triple keeps the relative order prescribed by the query
    let position: Vec<usize> = {
        let mut pos = vec![0; n];
        for (k, &i) in query.order.iter().enumerate() {
            pos[i] = k;
        }
        pos
    };
    let sub_queries: Vec<OrderedQuery> = triples
        .iter()
        .map(|t| {
            let mut members = t.to_vec();
            members.sort_by_key(|&i| position[i]);
            let sub = query.scene.subscene(&members);
            let mut q = OrderedQuery::identity(sub);
            q.tie_tol = query.tie_tol;
            q
        })
        .collect();

    let rows = directions
        .par_iter()
        .map(|u| {
            let whole = direction_feasible(query, u, opts)?;
            let mut all = true;
            let mut worst = f64::NEG_INFINITY;
            for q in &sub_queries {
                let f = direction_feasible(q, u, opts)?;
                all &= f.feasible;
                worst = worst.max(f.slack);
            }
            Ok((u.clone(), whole.feasible, all, (whole.slack - worst).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = HellyReport {
        directions: directions.len(),
        feasible_directions: 0,
        discrepancies: Vec::new(),
        max_slack_gap: 0.0,
    };
    for (u, whole, all, gap) in rows {
        report.feasible_directions += usize::from(whole);
        report.max_slack_gap = report.max_slack_gap.max(gap);
        if whole != all {
            report.discrepancies.push(u);
        }
    }
    Ok(report)
}
