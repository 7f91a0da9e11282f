//! Local refinement on the sphere: slack minimization, boundary bisection and
//! a lattice-plus-refinement search for feasible directions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{direction_feasible, sample_directions, OrderedQuery};
use crate::error::Result;
use crate::geom::sphere::{great_circle_point, lattice_spacing};
use crate::geom::{
    disks_common_point, orthogonal_basis, project_to_orthogonal_plane, vec, Direction, MinimaxOptions,
};

/// Order violation `max_k <c_{π_k} - c_{π_{k+1}}, u>`: negative iff the
/// centers project in the prescribed order.
pub(crate) fn order_margin(query: &OrderedQuery, u: &Direction) -> f64 {
    let balls = query.scene().balls();
    query
        .order()
        .windows(2)
        .map(|w| vec::dot(&vec::sub(&balls[w[0]].center, &balls[w[1]].center), u.components()))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Continuous objective whose sublevel set `{g <= tol}` is the closed cone of
/// `query`, with ties counted as infeasible.
pub(crate) fn cone_objective(query: &OrderedQuery, u: &Direction, opts: &MinimaxOptions) -> Result<f64> {
    let disks = project_to_orthogonal_plane(query.scene(), u)?;
    let slack = disks_common_point(&disks, opts)?.slack;
    Ok(slack.max(order_margin(query, u) + query.tie_tol()))
}

/// Nelder–Mead on the tangent plane at `start`.  Returns the best direction
/// and its objective value.
pub fn minimize_slack(
    query: &OrderedQuery,
    start: &Direction,
    initial_step: f64,
    opts: &MinimaxOptions,
) -> Result<(Direction, f64)> {
    let mut center = start.clone();
    let mut best_val = cone_objective(query, &center, opts)?;
    let mut step = initial_step;
    // restarts re-center the chart, which keeps the simplex well shaped
    for _ in 0..6 {
        let (u, val) = nelder_mead(query, &center, step, opts)?;
        let improved = val < best_val;
        if improved {
            center = u;
            best_val = val;
        }
        if best_val <= opts.tol || (!improved && step < 1e-12) {
            break;
        }
        step = (step * 0.1).max(1e-13);
    }
    Ok((center, best_val))
}

fn nelder_mead(query: &OrderedQuery, base: &Direction, step: f64, opts: &MinimaxOptions) -> Result<(Direction, f64)> {
    let basis = orthogonal_basis(base);
    let m = basis.len();
    let lift = |y: &[f64]| -> Direction {
        let mut p = base.components().to_vec();
        for (e, c) in basis.iter().zip(y) {
            vec::axpy(&mut p, *c, e);
        }
        Direction::new(p).expect("tangent offset of a unit vector")
    };
    let f = |y: &[f64]| cone_objective(query, &lift(y), opts);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m + 1);
    let origin = vec![0.0; m];
    simplex.push((origin.clone(), f(&origin)?));
    for k in 0..m {
        let mut y = origin.clone();
        y[k] = step;
        let v = f(&y)?;
        simplex.push((y, v));
    }

    for _ in 0..4000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let size = simplex[1..]
            .iter()
            .map(|(y, _)| vec::dist(y, &simplex[0].0))
            .fold(0.0, f64::max);
        if size < 1e-15 || simplex[0].1 <= opts.tol * 0.5 {
            break;
        }
        let mut centroid = vec![0.0; m];
        for (y, _) in &simplex[..m] {
            vec::axpy(&mut centroid, 1.0 / m as f64, y);
        }
        let worst = simplex[m].clone();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = toward(1.0);
        let fr = f(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(2.0);
            let fe = f(&xe)?;
            simplex[m] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[m - 1].1 {
            simplex[m] = (xr, fr);
        } else {
            let xc = if fr < worst.1 { toward(0.5) } else { toward(-0.5) };
            let fc = f(&xc)?;
            if fc < worst.1.min(fr) {
                simplex[m] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let y: Vec<f64> = best.iter().zip(&entry.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let v = f(&y)?;
                    *entry = (y, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok((lift(&simplex[0].0), simplex[0].1))
}

/// Bisects the great-circle arc from a feasible `inside` to an infeasible
/// `outside` and returns the last feasible point.
pub fn boundary_point(
    query: &OrderedQuery,
    inside: &Direction,
    outside: &Direction,
    opts: &MinimaxOptions,
) -> Result<Option<Direction>> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut last = inside.clone();
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let Some(u) = great_circle_point(inside, outside, mid) else {
            return Ok(None);
        };
        if direction_feasible(query, &u, opts)?.feasible {
            lo = mid;
            last = u;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    Ok(Some(last))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSearchReport {
    pub lattice_samples: usize,
    pub lattice_feasible: usize,
    /// Refined points that reached the feasibility tolerance.
    pub refined_feasible: usize,
    /// Leader-clustering representatives of all feasible directions found,
    /// at angular radius `cluster_radius` (capped at 1000).
    pub representatives: Vec<Direction>,
    pub cluster_radius: f64,
    /// Largest angle between the first representative and any feasible
    /// direction found.
    pub spread: f64,
    /// Lowest objective value reached.
    pub best_value: f64,
    pub best_direction: Direction,
}

/// Lattice sampling followed by local refinement from the best lattice
/// points, so that cones with empty interior are still found.
pub fn feasible_direction_search(
    query: &OrderedQuery,
    samples: usize,
    seed: u64,
    refinements: usize,
    cluster_radius: f64,
    opts: &MinimaxOptions,
) -> Result<FeasibleSearchReport> {
    let d = query.scene().dimension();
    let dirs = sample_directions(d, samples, seed);
    let values: Vec<f64> = dirs
        .par_iter()
        .map(|u| cone_objective(query, u, opts))
        .collect::<Result<_>>()?;

    let mut feasible: Vec<Direction> = Vec::new();
    for (u, v) in dirs.iter().zip(&values) {
        if *v <= opts.tol && direction_feasible(query, u, opts)?.feasible {
            feasible.push(u.clone());
        }
    }
    let lattice_feasible = feasible.len();

    // well separated starting points, best first
    let spacing = lattice_spacing(d, samples);
    let mut idx: Vec<usize> = (0..dirs.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut starts: Vec<usize> = Vec::new();
    for &i in &idx {
        if starts.len() >= refinements {
            break;
        }
        if starts.iter().all(|&j| dirs[i].angle_to(&dirs[j]) > 10.0 * spacing) {
            starts.push(i);
        }
    }
    let refined: Vec<(Direction, f64)> = starts
        .par_iter()
        .map(|&i| minimize_slack(query, &dirs[i], 2.0 * spacing, opts))
        .collect::<Result<_>>()?;

    let mut best_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best_direction = idx.first().map(|&i| dirs[i].clone()).unwrap_or_else(|| dirs[0].clone());
    let mut refined_feasible = 0;
    for (u, v) in refined {
        if v < best_value {
            best_value = v;
            best_direction = u.clone();
        }
        if v <= opts.tol && direction_feasible(query, &u, opts)?.feasible {
            refined_feasible += 1;
            feasible.push(u);
        }
    }

    let mut representatives: Vec<Direction> = Vec::new();
    for u in &feasible {
        if representatives.len() >= 1000 {
            break;
        }
        if representatives.iter().all(|r| r.angle_to(u) > cluster_radius) {
            representatives.push(u.clone());
        }
    }
    let spread = match representatives.first() {
        Some(r) => feasible.iter().map(|u| r.angle_to(u)).fold(0.0, f64::max),
        None => 0.0,
    };
    Ok(FeasibleSearchReport {
        lattice_samples: dirs.len(),
        lattice_feasible,
        refined_feasible,
        representatives,
        cluster_radius,
        spread,
        best_value,
        best_direction,
    })
}
