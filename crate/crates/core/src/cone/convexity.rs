//! Empirical geodesic convexity of a direction cone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::{boundary_point, cone_objective, minimize_slack};
use super::{direction_feasible, sample_directions, OrderedQuery};
use crate::error::Result;
use crate::geom::sphere::{exp_map, geodesic_midpoint, lattice_spacing, random_in_cap, random_tangent};
use crate::geom::{Direction, MinimaxOptions};

/// Fewer feasible lattice points than this triggers local refinement.
const MIN_FEASIBLE: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityOptions {
    pub pairs: usize,
    pub lattice: usize,
    pub seed: u64,
    /// Pairs of boundary points used for the strictness test.
    pub strict_pairs: usize,
    pub minimax: MinimaxOptions,
}

impl Default for ConvexityOptions {
    fn default() -> Self {
        Self {
            pairs: 10_000,
            lattice: 20_000,
            seed: 1,
            strict_pairs: 200,
            minimax: MinimaxOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MidpointViolation {
    pub u: Direction,
    pub v: Direction,
    pub midpoint: Direction,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub feasible_samples: usize,
    pub pairs_tested: usize,
    pub violations: Vec<MidpointViolation>,
    /// Smallest depth `-g(midpoint)` over all tested pairs.
    pub min_midpoint_depth: f64,
    pub strict_pairs_tested: usize,
    pub strictness_violations: usize,
    /// Smallest depth of a midpoint of two boundary points.
    pub min_boundary_midpoint_depth: f64,
    /// Fewer than two feasible directions: nothing can be concluded.
    pub inconclusive: bool,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        !self.inconclusive && self.violations.is_empty() && self.strictness_violations == 0
    }
}

pub fn cone_convexity_check(query: &OrderedQuery, opts: &ConvexityOptions) -> Result<ConvexityReport> {
    let mm = &opts.minimax;
    let d = query.scene().dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dirs = sample_directions(d, opts.lattice, opts.seed);
    let scored: Vec<(Direction, f64)> = dirs
        .into_par_iter()
        .map(|u| {
            let g = cone_objective(query, &u, mm)?;
            Ok((u, g))
        })
        .collect::<Result<_>>()?;
    let mut feasible: Vec<(Direction, f64)> = scored.iter().filter(|(_, g)| *g <= mm.tol).cloned().collect();

    if feasible.len() < MIN_FEASIBLE {
        let start = scored
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(u, _)| u.clone())
            .expect("nonempty lattice");
        let spacing = lattice_spacing(d, opts.lattice);
        let (center, g) = minimize_slack(query, &start, 2.0 * spacing, mm)?;
        if g <= mm.tol {
            feasible.push((center.clone(), g));
            // shrink a cap around the refined point until it yields samples
            let mut radius = 4.0 * spacing;
            while feasible.len() < 4 * MIN_FEASIBLE && radius > 1e-9 {
                for _ in 0..256 {
                    let u = random_in_cap(&mut rng, &center, radius);
                    let g = cone_objective(query, &u, mm)?;
                    if g <= mm.tol {
                        feasible.push((u, g));
                    }
                }
                radius *= 0.25;
            }
        }
    }
    // keep only points the exact predicate agrees with
    feasible.retain(|(u, _)| direction_feasible(query, u, mm).map(|f| f.feasible).unwrap_or(false));

    let mut report = ConvexityReport {
        feasible_samples: feasible.len(),
        pairs_tested: 0,
        violations: Vec::new(),
        min_midpoint_depth: f64::INFINITY,
        strict_pairs_tested: 0,
        strictness_violations: 0,
        min_boundary_midpoint_depth: f64::INFINITY,
        inconclusive: feasible.len() < 2,
    };
    if report.inconclusive {
        return Ok(report);
    }

    let boundary = boundary_samples(query, &feasible, 2 * opts.strict_pairs.max(100), &mut rng, mm)?;
    let mut pool: Vec<Direction> = feasible.iter().map(|(u, _)| u.clone()).collect();
    let first_boundary = pool.len();
    pool.extend(boundary.iter().cloned());

    // half the trials use arbitrary pairs, half use neighbouring boundary
    // points, where a local loss of convexity would show
    let pairs: Vec<(usize, usize)> = (0..opts.pairs)
        .map(|k| {
            if k % 2 == 1 && boundary.len() >= 2 {
                let i = rng.random_range(0..boundary.len());
                let step = rng.random_range(1..=4.min(boundary.len() - 1));
                (first_boundary + i, first_boundary + (i + step) % boundary.len())
            } else {
                let i = rng.random_range(0..pool.len());
                let mut j = rng.random_range(0..pool.len() - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            }
        })
        .collect();
    let outcomes: Vec<Option<(Direction, f64, bool)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let Some(m) = geodesic_midpoint(&pool[i], &pool[j]) else {
                return Ok(None);
            };
            let g = cone_objective(query, &m, mm)?;
            let ok = g <= mm.tol && direction_feasible(query, &m, mm)?.feasible;
            Ok(Some((m, g, ok)))
        })
        .collect::<Result<_>>()?;
    for (&(i, j), out) in pairs.iter().zip(outcomes) {
        let Some((m, g, ok)) = out else { continue };
        report.pairs_tested += 1;
        report.min_midpoint_depth = report.min_midpoint_depth.min(-g);
        if !ok {
            report.violations.push(MidpointViolation {
                u: pool[i].clone(),
                v: pool[j].clone(),
                midpoint: m,
                objective: g,
            });
        }
    }

    strictness(query, &boundary, opts, &mut rng, &mut report)?;
    Ok(report)
}

/// Feasible points on the cone boundary, found by bisection along rays from
/// the deepest feasible sample.  In R^3 the rays are evenly spaced in angle,
/// so consecutive points are neighbours on the boundary.
fn boundary_samples(
    query: &OrderedQuery,
    feasible: &[(Direction, f64)],
    rays: usize,
    rng: &mut ChaCha8Rng,
    mm: &MinimaxOptions,
) -> Result<Vec<Direction>> {
    let interior = feasible
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(u, _)| u.clone())
        .expect("checked nonempty");
    if cone_objective(query, &interior, mm)? > -mm.tol {
        // no interior point: the cone has empty interior
        return Ok(Vec::new());
    }
    let planar = query.scene().dimension() == 3;
    let frame = crate::geom::orthogonal_basis(&interior);
    let tangents: Vec<Vec<f64>> = (0..rays)
        .map(|k| {
            if planar {
                let phi = std::f64::consts::TAU * k as f64 / rays as f64;
                let mut t = vec![0.0; 3];
                crate::geom::vec::axpy(&mut t, phi.cos(), &frame[0]);
                crate::geom::vec::axpy(&mut t, phi.sin(), &frame[1]);
                t
            } else {
                random_tangent(rng, &interior)
            }
        })
        .collect();
    let found: Vec<Option<Direction>> = tangents
        .par_iter()
        .map(|t| {
            let mut theta = 1e-3;
            while theta < std::f64::consts::FRAC_PI_2 {
                let u = exp_map(&interior, t, theta);
                if !direction_feasible(query, &u, mm)?.feasible {
                    return boundary_point(query, &interior, &u, mm);
                }
                theta *= 1.5;
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Midpoints of well separated boundary points must lie strictly inside.
fn strictness(
    query: &OrderedQuery,
    boundary: &[Direction],
    opts: &ConvexityOptions,
    rng: &mut ChaCha8Rng,
    report: &mut ConvexityReport,
) -> Result<()> {
    let mm = &opts.minimax;
    if opts.strict_pairs == 0 || boundary.len() < 2 {
        return Ok(());
    }
    let reach = boundary.iter().map(|b| b.angle_to(&boundary[0])).fold(0.0, f64::max);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < opts.strict_pairs && attempts < 20 * opts.strict_pairs {
        attempts += 1;
        let i = rng.random_range(0..boundary.len());
        let j = rng.random_range(0..boundary.len());
        if boundary[i].angle_to(&boundary[j]) < 0.1 * reach {
            continue;
        }
        let Some(m) = geodesic_midpoint(&boundary[i], &boundary[j]) else { continue };
        tested += 1;
        let depth = -cone_objective(query, &m, mm)?;
        report.min_boundary_midpoint_depth = report.min_boundary_midpoint_depth.min(depth);
        if depth <= mm.tol {
            report.strictness_violations += 1;
        }
    }
    report.strict_pairs_tested = tested;
    Ok(())
}
