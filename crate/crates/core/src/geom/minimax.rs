//! Common point of a family of disks (balls of `u^⊥`).
//!
//! Minimizes `f(x) = max_i (|x - c_i| - r_i)`. The minimizer lies in the
//! convex hull of at most `m + 1` tight centers (`m` = ambient dimension), and
//! for a fixed tight set the conditions `|x - c_i| = r_i + t` reduce to a
//! linear system in the affine hull plus one quadratic in `t`. The solver runs
//! a basis-exchange loop: solve exactly on a small working set, add the most
//! violated disk, drop slack members, repeat until nothing is violated.

use serde::{Deserialize, Serialize};

use super::vec;
use super::ProjectedDisk;
use crate::error::{Result, TransversalError};

pub const DEFAULT_MINIMAX_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxOptions {
    /// Feasible iff the optimal slack is at most `tol`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_MINIMAX_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl MinimaxOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonPoint {
    pub point: Vec<f64>,
    /// `max_i (|x - c_i| - r_i)` at `point`; non-positive iff `point` lies in
    /// every disk.
    pub slack: f64,
    pub feasible: bool,
    /// Disks tight at the optimum.
    pub support: Vec<usize>,
    pub iterations: usize,
}

/// Minimizes `max_i (|x - c_i| - r_i)` over `x`.
pub fn disks_common_point(disks: &[ProjectedDisk], opts: &MinimaxOptions) -> Result<CommonPoint> {
    if disks.is_empty() {
        return Err(TransversalError::InvalidParameter("no disks given".into()));
    }
    let m = disks[0].center.len();
    if disks.iter().any(|d| d.center.len() != m) {
        return Err(TransversalError::InvalidParameter("disks of mixed dimension".into()));
    }
    let scale = disks
        .iter()
        .map(|d| d.radius.max(vec::norm(&d.center)))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale;

    let slack_at = |x: &[f64], idx: &mut dyn Iterator<Item = usize>| -> f64 {
        idx.map(|i| vec::dist(x, &disks[i].center) - disks[i].radius)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let start = (0..disks.len())
        .max_by(|&a, &b| disks[a].radius.total_cmp(&disks[b].radius))
        .expect("nonempty");
    let mut working: Vec<usize> = vec![start];
    let mut last_t = f64::NEG_INFINITY;
    let mut full_pass = false;

    for iteration in 1..=opts.max_iterations {
        let (x, t) = solve_small(disks, &working, m);
        let all = slack_at(&x, &mut (0..disks.len()));
        let violator = (0..disks.len())
            .filter(|i| !working.contains(i))
            .map(|i| (i, vec::dist(&x, &disks[i].center) - disks[i].radius))
            .filter(|&(_, v)| v > t + eps)
            .max_by(|a, b| a.1.total_cmp(&b.1));

        match violator {
            None => {
                let support = (0..disks.len())
                    .filter(|&i| vec::dist(&x, &disks[i].center) - disks[i].radius >= all - 1e-9 * scale)
                    .collect();
                return Ok(CommonPoint {
                    feasible: all <= opts.tol,
                    point: x,
                    slack: all,
                    support,
                    iterations: iteration,
                });
            }
            Some((j, _)) => {
                if t <= last_t + eps * 1e-3 && !full_pass {
                    // No progress: fall back to an exact solve on every disk.
                    working = (0..disks.len()).collect();
                    full_pass = true;
                    continue;
                }
                if full_pass {
                    return Err(TransversalError::SolverFailure {
                        iterations: iteration,
                        last_slack: all,
                    });
                }
                last_t = t;
                let mut next: Vec<usize> = working
                    .iter()
                    .copied()
                    .filter(|&i| vec::dist(&x, &disks[i].center) - disks[i].radius >= t - 1e-9 * scale)
                    .collect();
                next.push(j);
                working = next;
            }
        }
    }
    Err(TransversalError::SolverFailure {
        iterations: opts.max_iterations,
        last_slack: f64::NAN,
    })
}

/// Exact minimax over the disks in `working`, by enumerating tight subsets of
/// size at most `m + 1`. Each candidate is scored with the true objective on
/// `working`, so the best candidate is the optimum.
fn solve_small(disks: &[ProjectedDisk], working: &[usize], m: usize) -> (Vec<f64>, f64) {
    let k = working.len();
    let objective = |x: &[f64]| {
        working
            .iter()
            .map(|&i| vec::dist(x, &disks[i].center) - disks[i].radius)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |x: Vec<f64>| {
        let v = objective(&x);
        if best.as_ref().map_or(true, |(_, b)| v < *b) {
            best = Some((x, v));
        }
    };
    let max_size = (m + 1).min(k);
    for size in 1..=max_size {
        for_each_combination(k, size, &mut |pos| {
            let subset: Vec<usize> = pos.iter().map(|&b| working[b]).collect();
            for x in tight_candidates(disks, &subset) {
                consider(x);
            }
        });
    }
    best.expect("singletons always yield a candidate")
}

fn for_each_combination(n: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, f);
            cur.pop();
        }
    }
    rec(0, n, size, &mut Vec::with_capacity(size), f);
}

/// Points `x` in the affine hull of the subset's centers where every disk of
/// the subset has the same offset `|x - c_i| - r_i`.
fn tight_candidates(disks: &[ProjectedDisk], subset: &[usize]) -> Vec<Vec<f64>> {
    let c0 = &disks[subset[0]].center;
    let r0 = disks[subset[0]].radius;
    if subset.len() == 1 {
        return vec![c0.clone()];
    }
    let edges: Vec<Vec<f64>> = subset[1..].iter().map(|&i| vec::sub(&disks[i].center, c0)).collect();
    let n = edges.len();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| vec::dot(&edges[a], &edges[b])).collect())
        .collect();
    // <y, e_l> = (|e_l|^2 - r_l^2 + r_0^2)/2 - t (r_l - r_0), with y = x - c_0
    let rhs: Vec<Vec<f64>> = subset[1..]
        .iter()
        .zip(&edges)
        .map(|(&i, e)| {
            let rl = disks[i].radius;
            vec![0.5 * (vec::dot(e, e) - rl * rl + r0 * r0), -(rl - r0)]
        })
        .collect();
    let Some(sol) = vec::solve_dense(gram, rhs, 1e-12) else {
        return Vec::new();
    };
    let dim = c0.len();
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    for (l, e) in edges.iter().enumerate() {
        vec::axpy(&mut a, sol[l][0], e);
        vec::axpy(&mut b, sol[l][1], e);
    }
    // |A + B t|^2 = (r_0 + t)^2
    let qa = vec::dot(&b, &b) - 1.0;
    let qb = 2.0 * (vec::dot(&a, &b) - r0);
    let qc = vec::dot(&a, &a) - r0 * r0;
    let mut roots = Vec::with_capacity(2);
    if qa.abs() < 1e-14 {
        if qb != 0.0 {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // numerically stable pair
            let qq = -0.5 * (qb + qb.signum() * sq);
            if qq != 0.0 {
                roots.push(qq / qa);
                roots.push(qc / qq);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots
        .into_iter()
        .filter(|t| t.is_finite())
        .map(|t| {
            let mut x = c0.clone();
            vec::axpy(&mut x, 1.0, &a);
            vec::axpy(&mut x, t, &b);
            x
        })
        .collect()
}
