//! Zero-set contours of `σ`, `H(σ)` and the pair conics in an affine chart.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{eval_hessian_sigma, eval_sigma_expanded, pair_cone_quadratic, Triple};
use crate::geom::Ball;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChartKind {
    /// The chart `u_k = 1`, with the remaining two coordinates in order.
    Coordinate(usize),
    /// `u = origin + x e1 + y e2`.
    Plane {
        origin: [f64; 3],
        e1: [f64; 3],
        e2: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Chart {
    pub fn coordinate(k: usize, half_width: f64) -> Self {
        Self {
            kind: ChartKind::Coordinate(k),
            x_range: (-half_width, half_width),
            y_range: (-half_width, half_width),
        }
    }

    pub fn lift(&self, x: f64, y: f64) -> [f64; 3] {
        match &self.kind {
            ChartKind::Coordinate(k) => {
                let mut u = [0.0; 3];
                u[*k] = 1.0;
                let others: Vec<usize> = (0..3).filter(|i| i != k).collect();
                u[others[0]] = x;
                u[others[1]] = y;
                u
            }
            ChartKind::Plane { origin, e1, e2 } => [0, 1, 2].map(|i| origin[i] + x * e1[i] + y * e2[i]),
        }
    }

    /// Inverse of [`Chart::lift`] for a direction not parallel to the chart.
    pub fn project(&self, u: &[f64; 3]) -> Option<(f64, f64)> {
        match &self.kind {
            ChartKind::Coordinate(k) => {
                if u[*k].abs() < 1e-14 {
                    return None;
                }
                let others: Vec<usize> = (0..3).filter(|i| i != k).collect();
                Some((u[others[0]] / u[*k], u[others[1]] / u[*k]))
            }
            ChartKind::Plane { origin, e1, e2 } => {
                // solve s u = origin + x e1 + y e2
                let m = nalgebra::Matrix3::new(
                    u[0], -e1[0], -e2[0], u[1], -e1[1], -e2[1], u[2], -e1[2], -e2[2],
                );
                let sol = m.lu().solve(&nalgebra::Vector3::new(origin[0], origin[1], origin[2]))?;
                (sol[0] > 0.0).then_some((sol[1], sol[2]))
            }
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ChartKind::Coordinate(k) => format!("u{}=1", k + 1),
            ChartKind::Plane { .. } => "plane".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub name: String,
    pub polylines: Vec<Vec<[f64; 2]>>,
}

impl CurveTrace {
    pub fn vertices(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.polylines.iter().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSet {
    pub chart: Chart,
    pub grid: usize,
    pub curves: Vec<CurveTrace>,
}

impl TraceSet {
    pub fn curve(&self, name: &str) -> Option<&CurveTrace> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// `curve,chart,x,y` rows; polylines are separated by the polyline index
    /// in the curve name (`sigma#0`, `sigma#1`, ...).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("curve,chart,x,y\n");
        let chart = self.chart.name();
        for c in &self.curves {
            for (k, line) in c.polylines.iter().enumerate() {
                for p in line {
                    out.push_str(&format!("{}#{},{},{},{}\n", c.name, k, chart, p[0], p[1]));
                }
            }
        }
        out
    }
}

pub const CURVE_NAMES: [&str; 5] = ["sigma", "hessian", "conic01", "conic02", "conic12"];

/// Marching-squares contours of `σ`, `H(σ)` and the three pair conics on a
/// `grid x grid` lattice over the chart; contour vertices are refined by
/// bisection along grid edges. Components smaller than a grid cell may be
/// missed.
pub fn trace_curves(triple: &Triple, chart: &Chart, grid: usize) -> TraceSet {
    let grid = grid.max(2);
    let balls: Vec<Ball> = (0..3)
        .map(|k| Ball {
            center: triple.centers()[k].to_vec(),
            radius: triple.radii()[k],
        })
        .collect();
    let conic = |i: usize, j: usize| pair_cone_quadratic(&balls[i], &balls[j]).expect("3d balls");
    let conics = [conic(0, 1), conic(0, 2), conic(1, 2)];

    let mut curves = Vec::with_capacity(5);
    curves.push(CurveTrace {
        name: CURVE_NAMES[0].into(),
        polylines: trace_zero_set(&|x, y| eval_sigma_expanded(triple, &chart.lift(x, y)), chart, grid),
    });
    curves.push(CurveTrace {
        name: CURVE_NAMES[1].into(),
        polylines: trace_zero_set(&|x, y| eval_hessian_sigma(triple, &chart.lift(x, y)), chart, grid),
    });
    for (k, m) in conics.iter().enumerate() {
        curves.push(CurveTrace {
            name: CURVE_NAMES[2 + k].into(),
            polylines: trace_zero_set(&|x, y| m.eval(&chart.lift(x, y)), chart, grid),
        });
    }
    TraceSet {
        chart: chart.clone(),
        grid,
        curves,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// Between nodes (i, j) and (i + 1, j).
    H(usize, usize),
    /// Between nodes (i, j) and (i, j + 1).
    V(usize, usize),
}

/// Polylines approximating `{f = 0}` over the chart rectangle.
pub fn trace_zero_set(f: &dyn Fn(f64, f64) -> f64, chart: &Chart, grid: usize) -> Vec<Vec<[f64; 2]>> {
    let (x0, x1) = chart.x_range;
    let (y0, y1) = chart.y_range;
    let xs: Vec<f64> = (0..=grid).map(|i| x0 + (x1 - x0) * i as f64 / grid as f64).collect();
    let ys: Vec<f64> = (0..=grid).map(|j| y0 + (y1 - y0) * j as f64 / grid as f64).collect();
    let vals: Vec<Vec<f64>> = xs.iter().map(|&x| ys.iter().map(|&y| f(x, y)).collect()).collect();
    let pos = |v: f64| v >= 0.0;

    let mut roots: HashMap<EdgeKey, [f64; 2]> = HashMap::new();
    let mut root_of = |key: EdgeKey| -> [f64; 2] {
        *roots.entry(key).or_insert_with(|| {
            let (a, b, fa) = match key {
                EdgeKey::H(i, j) => ([xs[i], ys[j]], [xs[i + 1], ys[j]], vals[i][j]),
                EdgeKey::V(i, j) => ([xs[i], ys[j]], [xs[i], ys[j + 1]], vals[i][j]),
            };
            bisect(f, a, b, fa)
        })
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let corners = [vals[i][j], vals[i + 1][j], vals[i + 1][j + 1], vals[i][j + 1]];
            let edges = [EdgeKey::H(i, j), EdgeKey::V(i + 1, j), EdgeKey::H(i, j + 1), EdgeKey::V(i, j)];
            let crossing: Vec<EdgeKey> = (0..4)
                .filter(|&e| pos(corners[e]) != pos(corners[(e + 1) % 4]))
                .map(|e| edges[e])
                .collect();
            match crossing.len() {
                2 => segments.push((crossing[0], crossing[1])),
                4 => {
                    // saddle: pair edges according to the sign at the cell center
                    let center = f(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
                    if pos(center) == pos(corners[0]) {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[0], edges[3]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    // chain segments through shared edges
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(k);
        adjacency.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    // start at open ends first so open curves come out in one piece
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&k| {
            let (a, b) = segments[k];
            adjacency[&a].len() == 1 || adjacency[&b].len() == 1
        })
        .collect();
    starts.extend(0..segments.len());
    for start in starts {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let (first, mut tail) = if adjacency[&b].len() == 1 { (b, a) } else { (a, b) };
        let mut keys = vec![first, tail];
        loop {
            let next = adjacency[&tail].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (p, q) = segments[s];
            tail = if p == tail { q } else { p };
            keys.push(tail);
        }
        polylines.push(keys.into_iter().map(&mut root_of).collect());
    }
    polylines
}

fn bisect(f: &dyn Fn(f64, f64) -> f64, mut a: [f64; 2], mut b: [f64; 2], fa: f64) -> [f64; 2] {
    let sa = fa >= 0.0;
    for _ in 0..200 {
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        if m == a || m == b {
            break;
        }
        let fm = f(m[0], m[1]);
        if fm == 0.0 {
            return m;
        }
        if (fm >= 0.0) == sa {
            a = m;
        } else {
            b = m;
        }
    }
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}
