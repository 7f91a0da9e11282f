//! Sign of the Hessian of the direction sextic at the boundary of a cone.
//!
//! A boundary direction carries a tritangent crossing the triangle of
//! centers.  Projecting along it gives a triangle `c̃_0 = (0, 0)`,
//! `c̃_1 = (a, 0)`, `c̃_2 = (b, c)` with an interior point
//! `p = Σ p_k c̃_k` (barycentric weights summing to one) and heights `x_k`
//! of the centers along the tangent.  With `v_k = p - c̃_k`, `s_k = |v_k|^2`,
//! `q_k = p_k r_k` and `z_k = (x_i - x_j)^2` (`{i, j, k} = {0, 1, 2}`), the
//! Hessian of `σ` at the tangent direction is a positive multiple of
//! `H2 + H4`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{boundary_point, enumerate_geometric_permutations, OrderedQuery};
use crate::error::{Result, TransversalError};
use crate::geom::sphere::exp_map;
use crate::geom::{disks_common_point, orthogonal_basis, project_to_orthogonal_plane, vec, Direction, MinimaxOptions};
use crate::sextic::{eval_hessian_sigma, Triple};

/// Normalized margins at or below this count as non-positive.
pub const MARGIN_FLOOR: f64 = 1e-12;

/// The two indices other than `k`, in cyclic order.
pub fn others(k: usize) -> (usize, usize) {
    ((k + 1) % 3, (k + 2) % 3)
}

/// Planar picture of a tritangent seen along its direction, lifted by the
/// heights of the centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Barycentric weights of the tangent point, summing to one.
    pub p: [f64; 3],
    /// Heights of the centers along the tangent direction.
    pub x: [f64; 3],
}

impl LiftedConfig {
    /// Weights are rescaled to sum to one; they must be positive.
    pub fn new(a: f64, b: f64, c: f64, p: [f64; 3], x: [f64; 3]) -> Result<Self> {
        if !(a > 0.0 && c > 0.0 && b.is_finite()) {
            return Err(TransversalError::DomainViolation(format!(
                "triangle needs a > 0 and c > 0, got a={a}, b={b}, c={c}"
            )));
        }
        if !p.iter().all(|&w| w > 0.0 && w.is_finite()) {
            return Err(TransversalError::DomainViolation(format!("weights must be positive, got {p:?}")));
        }
        if !x.iter().all(|h| h.is_finite()) {
            return Err(TransversalError::DomainViolation("non-finite height".into()));
        }
        Ok(Self::new_unchecked(a, b, c, p, x))
    }

    /// Normalizes `p` but skips every other check, for degenerate probes.
    pub fn new_unchecked(a: f64, b: f64, c: f64, p: [f64; 3], x: [f64; 3]) -> Self {
        let total: f64 = p.iter().sum();
        Self {
            a,
            b,
            c,
            p: p.map(|w| w / total),
            x,
        }
    }

    pub fn vertices(&self) -> [[f64; 2]; 3] {
        [[0.0, 0.0], [self.a, 0.0], [self.b, self.c]]
    }

    pub fn point(&self) -> [f64; 2] {
        let v = self.vertices();
        [0, 1].map(|d| (0..3).map(|k| self.p[k] * v[k][d]).sum())
    }

    pub fn v(&self, k: usize) -> [f64; 2] {
        let p = self.point();
        let c = self.vertices()[k];
        [p[0] - c[0], p[1] - c[1]]
    }

    pub fn s(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| {
            let v = self.v(k);
            v[0] * v[0] + v[1] * v[1]
        })
    }

    pub fn r(&self) -> [f64; 3] {
        self.s().map(f64::sqrt)
    }

    pub fn q(&self) -> [f64; 3] {
        let r = self.r();
        [0, 1, 2].map(|k| self.p[k] * r[k])
    }

    pub fn z(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            (self.x[i] - self.x[j]).powi(2)
        })
    }

    /// The three balls: centers `c̃_k + x_k e_3`, radii `|v_k|`.  The line
    /// through `p` parallel to `e_3` is tangent to all of them.
    pub fn lifted_triple(&self) -> Result<Triple> {
        let v = self.vertices();
        let centers = [0, 1, 2].map(|k| [v[k][0], v[k][1], self.x[k]]);
        Triple::new_allow_overlap(centers, self.r())
    }
}

/// `<v_i, v_j> = (q_k^2 - q_i^2 - q_j^2) / (2 p_i p_j)` off the diagonal,
/// `s_k` on it.
pub fn gram_from_barycentrics(cfg: &LiftedConfig) -> [[f64; 3]; 3] {
    let q = cfg.q();
    let s = cfg.s();
    let mut g = [[0.0; 3]; 3];
    for k in 0..3 {
        let (i, j) = others(k);
        let off = (q[k] * q[k] - q[i] * q[i] - q[j] * q[j]) / (2.0 * cfg.p[i] * cfg.p[j]);
        g[i][j] = off;
        g[j][i] = off;
        g[k][k] = s[k];
    }
    g
}

/// `Q = Σ (2 q_i^2 q_j^2) - Σ q_k^4`, sixteen times the squared area of a
/// triangle with sides `q_k`.
pub fn big_q(q: &[f64; 3]) -> f64 {
    let q2 = q.map(|x| x * x);
    2.0 * (q2[0] * q2[1] + q2[1] * q2[2] + q2[2] * q2[0]) - (q2[0] * q2[0] + q2[1] * q2[1] + q2[2] * q2[2])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QInvariant {
    pub q: f64,
    /// `Q / (4 Π p_k^2)`.
    pub delta: f64,
    /// `a^2 c^2` computed from the triangle directly.
    pub delta_direct: f64,
    /// The `q_k` satisfy strict triangle inequalities.
    pub nondegenerate: bool,
}

pub fn q_invariant(cfg: &LiftedConfig) -> QInvariant {
    let q = big_q(&cfg.q());
    let pp: f64 = cfg.p.iter().map(|w| w * w).product();
    QInvariant {
        q,
        delta: q / (4.0 * pp),
        delta_direct: (cfg.a * cfg.c).powi(2),
        nondegenerate: q > 1e-12 * cfg.q().iter().map(|x| x * x).sum::<f64>().powi(2),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianDecomposition {
    /// `-a^2 c^2 Π p_k Σ p_i p_j z_k`.
    pub h2: f64,
    /// `Σ p_k q_k^2 z_i z_j`.
    pub h4: f64,
    pub total: f64,
    /// `2^12 5^2 a^6 c^6`.
    pub prefactor: f64,
    /// `prefactor * total`, the Hessian of `σ` at `(0, 0, 1)`.
    pub hessian: f64,
}

pub fn lifted_hessian_decomposition(cfg: &LiftedConfig) -> HessianDecomposition {
    let p = cfg.p;
    let q = cfg.q();
    let z = cfg.z();
    let ac2 = (cfg.a * cfg.c).powi(2);
    let pprod: f64 = p.iter().product();
    let mut pair = 0.0;
    let mut h4 = 0.0;
    for k in 0..3 {
        let (i, j) = others(k);
        pair += p[i] * p[j] * z[k];
        h4 += p[k] * q[k] * q[k] * z[i] * z[j];
    }
    let h2 = -ac2 * pprod * pair;
    let total = h2 + h4;
    let prefactor = 4096.0 * 25.0 * ac2.powi(3);
    HessianDecomposition {
        h2,
        h4,
        total,
        prefactor,
        hessian: prefactor * total,
    }
}

/// Relative gap between the decomposition and the Hessian of the lifted
/// triple's sextic at `(0, 0, 1)`.
pub fn hessian_cross_check(cfg: &LiftedConfig) -> Result<f64> {
    let dec = lifted_hessian_decomposition(cfg);
    let direct = eval_hessian_sigma(&cfg.lifted_triple()?, &[0.0, 0.0, 1.0]);
    Ok((direct - dec.hessian).abs() / direct.abs().max(dec.hessian.abs()).max(f64::MIN_POSITIVE))
}

/// Coordinates `w_k = p_i p_j z_k / q_k^2` in which the Hessian becomes
/// `*H(w) = Σ w_i w_j - Σ α_k w_k` with `α_k = Q / (4 q_i^2 q_j^2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCoords {
    pub q: [f64; 3],
    pub big_q: f64,
    pub canonical_a: [f64; 3],
    /// `β_k = (α_i + α_j - α_k) / 2`, the center of the quadric.
    pub beta: [f64; 3],
    /// `Σ β_i β_j = Q^3 / (4^3 Π q_k^4)`.
    pub beta_pair_sum: f64,
    /// `V_k = 1 - ((q_i - q_j) / q_k)^2`; `w_k > V_k` iff balls `i`, `j`
    /// are disjoint.
    pub vertex: [f64; 3],
}

impl CanonicalCoords {
    pub fn from_q(q: [f64; 3]) -> Result<Self> {
        if !q.iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(TransversalError::DomainViolation(format!("q must be positive, got {q:?}")));
        }
        let bq = big_q(&q);
        let q2 = q.map(|x| x * x);
        let canonical_a = [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            bq / (4.0 * q2[i] * q2[j])
        });
        let beta = [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            0.5 * (canonical_a[i] + canonical_a[j] - canonical_a[k])
        });
        let vertex = [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            1.0 - ((q[i] - q[j]) / q[k]).powi(2)
        });
        Ok(Self {
            q,
            big_q: bq,
            canonical_a,
            beta,
            beta_pair_sum: beta[0] * beta[1] + beta[1] * beta[2] + beta[2] * beta[0],
            vertex,
        })
    }

    pub fn from_config(cfg: &LiftedConfig) -> Result<Self> {
        Self::from_q(cfg.q())
    }

    pub fn w_of(&self, cfg: &LiftedConfig) -> [f64; 3] {
        let z = cfg.z();
        [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            cfg.p[i] * cfg.p[j] * z[k] / (self.q[k] * self.q[k])
        })
    }

    /// `*H(V) = 3 Π (q_i + q_j - q_k)^2 / (4 Π q_k^2)`.
    pub fn star_h_vertex_closed_form(&self) -> f64 {
        let q = self.q;
        let num: f64 = (0..3)
            .map(|k| {
                let (i, j) = others(k);
                (q[i] + q[j] - q[k]).powi(2)
            })
            .product();
        let den: f64 = q.iter().map(|x| x * x).product();
        3.0 * num / (4.0 * den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarH {
    pub value: f64,
    /// `t = w - β`.
    pub t: [f64; 3],
    /// `Σ t_i t_j`.
    pub asymptotic: f64,
    /// `-Σ β_i β_j`, so that `value = asymptotic + constant`.
    pub constant: f64,
}

pub fn star_h_canonical(coords: &CanonicalCoords, w: &[f64; 3]) -> StarH {
    let pairs = |v: &[f64; 3]| v[0] * v[1] + v[1] * v[2] + v[2] * v[0];
    let value = pairs(w) - (0..3).map(|k| coords.canonical_a[k] * w[k]).sum::<f64>();
    let t = [0, 1, 2].map(|k| w[k] - coords.beta[k]);
    StarH {
        value,
        t,
        asymptotic: pairs(&t),
        constant: -coords.beta_pair_sum,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OctantCertificate {
    pub vertex: [f64; 3],
    pub star_h_at_vertex: f64,
    pub closed_form: f64,
    /// `Σ V_k`.
    pub plane_lhs: f64,
    /// `Q Σ q_k^2 / (8 Π q_k^2)`.
    pub plane_rhs: f64,
    pub plane_slack: f64,
    pub pass: bool,
    /// Degenerate `q`: the vertex lies on the quadric.
    pub boundary_case: bool,
}

/// The octant `{w_k > V_k}` misses the region `*H <= 0`: the vertex has
/// `*H(V) >= 0` and lies strictly on the far side of the tangent plane.
pub fn certify_octant_separation(coords: &CanonicalCoords) -> OctantCertificate {
    let v = coords.vertex;
    let at = star_h_canonical(coords, &v).value;
    let closed = coords.star_h_vertex_closed_form();
    let q = coords.q;
    let q2 = q.map(|x| x * x);
    let prod: f64 = q2.iter().product();
    let lhs: f64 = v.iter().sum();
    let rhs = coords.big_q * q2.iter().sum::<f64>() / (8.0 * prod);
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    // a tight or violated triangle inequality on q: tangent balls
    let qsum: f64 = q.iter().sum();
    let boundary_case = (0..3).any(|k| {
        let (i, j) = others(k);
        q[i] + q[j] - q[k] <= 1e-12 * qsum
    });
    OctantCertificate {
        vertex: v,
        star_h_at_vertex: at,
        closed_form: closed,
        plane_lhs: lhs,
        plane_rhs: rhs,
        plane_slack: lhs - rhs,
        pass: !boundary_case && at >= -1e-12 * scale && lhs > rhs,
        boundary_case,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexProbeOptions {
    /// Boundary samples per cone.
    pub samples: usize,
    /// Lattice size used to find the cones.
    pub lattice: usize,
    pub seed: u64,
    /// Golden-section refinement of the smallest margin along the boundary.
    pub refine: bool,
    pub minimax: MinimaxOptions,
}

impl Default for FlexProbeOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            lattice: 4000,
            seed: 1,
            refine: false,
            minimax: MinimaxOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexSample {
    pub order: Vec<usize>,
    pub direction: Direction,
    pub config: LiftedConfig,
    pub h2: f64,
    pub h4: f64,
    /// `(H2 + H4) / L^6` with `L` the longest projected edge.
    pub margin: f64,
    pub star_h: f64,
    /// Relative gap to the Hessian of the original triple's sextic.
    pub hessian_gap: f64,
    /// `min_k (w_k - V_k)`.
    pub disjointness_slack: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    /// Fewer than three disks tight: the boundary is a conic arc here.
    Bitangent,
    /// The tangent point is not inside the projected triangle.
    OutsideTriangle,
    /// Collinear projected centers.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexSkip {
    pub order: Vec<usize>,
    pub direction: Direction,
    pub reason: SkipReason,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexReport {
    pub cones: usize,
    pub samples: Vec<FlexSample>,
    pub skipped: Vec<FlexSkip>,
    pub min_margin: f64,
    pub min_disjointness_slack: f64,
    pub max_hessian_gap: f64,
    pub pass: bool,
}

impl FlexReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

enum Probe {
    Sample(Box<FlexSample>),
    Skip(SkipReason),
}

/// Lifted picture of the boundary direction `u`.
fn probe(triple: &Triple, order: &[usize], u: &Direction, mm: &MinimaxOptions) -> Result<Probe> {
    let scene = triple.to_scene();
    let disks = project_to_orthogonal_plane(&scene, u)?;
    let cp = disks_common_point(&disks, mm)?;
    let scale = triple.radii().iter().copied().fold(0.0, f64::max);
    let tight = disks
        .iter()
        .all(|d| (vec::dist(&d.center, &cp.point) - d.radius).abs() <= 1e-7 * scale);
    if !tight {
        return Ok(Probe::Skip(SkipReason::Bitangent));
    }
    // rigid motion taking c̃_0 to the origin and c̃_1 to the positive x axis
    let pc: Vec<[f64; 2]> = disks.iter().map(|d| [d.center[0], d.center[1]]).collect();
    let e = [pc[1][0] - pc[0][0], pc[1][1] - pc[0][1]];
    let a = e[0].hypot(e[1]);
    let (cs, sn) = (e[0] / a, e[1] / a);
    let place = |x: [f64; 2]| {
        let d = [x[0] - pc[0][0], x[1] - pc[0][1]];
        [cs * d[0] + sn * d[1], -sn * d[0] + cs * d[1]]
    };
    let mut c2 = place(pc[2]);
    let mut pt = place([cp.point[0], cp.point[1]]);
    if c2[1] < 0.0 {
        c2[1] = -c2[1];
        pt[1] = -pt[1];
    }
    let longest = a.max(c2[0].hypot(c2[1])).max((c2[0] - a).hypot(c2[1]));
    if c2[1] <= 1e-12 * longest {
        return Ok(Probe::Skip(SkipReason::Degenerate));
    }
    let p2 = pt[1] / c2[1];
    let p1 = (pt[0] - c2[0] * p2) / a;
    let p = [1.0 - p1 - p2, p1, p2];
    if p.iter().any(|&w| w <= 0.0) {
        return Ok(Probe::Skip(SkipReason::OutsideTriangle));
    }
    let heights = [0, 1, 2].map(|k| vec::dot(&scene.balls()[k].center, u.components()));
    let cfg = LiftedConfig::new(a, c2[0], c2[1], p, heights)?;
    let dec = lifted_hessian_decomposition(&cfg);
    let coords = CanonicalCoords::from_config(&cfg)?;
    let w = coords.w_of(&cfg);
    let uc = u.components();
    let direct = eval_hessian_sigma(triple, &[uc[0], uc[1], uc[2]]);
    let hessian_gap = (direct - dec.hessian).abs() / direct.abs().max(dec.hessian.abs()).max(f64::MIN_POSITIVE);
    let disjointness_slack = (0..3).map(|k| w[k] - coords.vertex[k]).fold(f64::INFINITY, f64::min);
    Ok(Probe::Sample(Box::new(FlexSample {
        order: order.to_vec(),
        direction: u.clone(),
        h2: dec.h2,
        h4: dec.h4,
        margin: dec.total / longest.powi(6),
        star_h: star_h_canonical(&coords, &w).value,
        hessian_gap,
        disjointness_slack,
        config: cfg,
    })))
}

/// Boundary point of `query` along the ray from `interior` at tangent angle
/// `phi` of the frame `(f0, f1)`.
fn ray_boundary(
    query: &OrderedQuery,
    interior: &Direction,
    frame: &[Vec<f64>],
    phi: f64,
    mm: &MinimaxOptions,
) -> Result<Option<Direction>> {
    let mut t = vec![0.0; 3];
    vec::axpy(&mut t, phi.cos(), &frame[0]);
    vec::axpy(&mut t, phi.sin(), &frame[1]);
    let mut theta = 1e-3;
    while theta < std::f64::consts::FRAC_PI_2 {
        let u = exp_map(interior, &t, theta);
        if !crate::cone::direction_feasible(query, &u, mm)?.feasible {
            return boundary_point(query, interior, &u, mm);
        }
        theta *= 1.25;
    }
    Ok(None)
}

/// Probes the Hessian of `σ` along the sextic arcs of the boundary of every
/// cone of the triple.  A coarse ray scan locates the arcs; `samples` rays
/// per cone are then spread evenly over them.  Boundary points on conic
/// arcs are reported as skipped.
pub fn certify_flex_free(triple: &Triple, opts: &FlexProbeOptions) -> Result<FlexReport> {
    let mm = &opts.minimax;
    let scene = triple.to_scene();
    let catalog = enumerate_geometric_permutations(&scene, opts.lattice, opts.seed, mm)?;
    let mut report = FlexReport {
        cones: catalog.len(),
        samples: Vec::new(),
        skipped: Vec::new(),
        min_margin: f64::INFINITY,
        min_disjointness_slack: f64::INFINITY,
        max_hessian_gap: 0.0,
        pass: false,
    };
    for perm in &catalog.permutations {
        let query = OrderedQuery::new(scene.clone(), perm.order.clone())?;
        let (interior, _) = crate::cone::minimize_slack(&query, &perm.witness, 0.05, mm)?;
        let interior = if crate::cone::direction_feasible(&query, &interior, mm)?.feasible {
            interior
        } else {
            perm.witness.clone()
        };
        let frame = orthogonal_basis(&interior);
        let n = opts.samples.max(1);
        // coarse scan to locate the arcs where all three disks are tight
        let coarse = (4 * n).max(720);
        let h = std::f64::consts::TAU / coarse as f64;
        let scan: Vec<(f64, Option<Direction>, Option<Probe>)> = (0..coarse)
            .into_par_iter()
            .map(|k| {
                let phi = h * k as f64;
                Ok(match ray_boundary(&query, &interior, &frame, phi, mm)? {
                    Some(u) => {
                        let pr = probe(triple, &perm.order, &u, mm)?;
                        (phi, Some(u), Some(pr))
                    }
                    None => (phi, None, None),
                })
            })
            .collect::<Result<_>>()?;
        let cells: Vec<f64> = scan
            .iter()
            .filter(|(_, _, pr)| matches!(pr, Some(Probe::Sample(_))))
            .map(|(phi, _, _)| *phi)
            .collect();
        for (_, u, pr) in &scan {
            if let (Some(u), Some(Probe::Skip(reason))) = (u, pr) {
                report.skipped.push(FlexSkip {
                    order: perm.order.clone(),
                    direction: u.clone(),
                    reason: *reason,
                });
            }
        }
        if cells.is_empty() {
            continue;
        }
        // n angles spread evenly over the union of tight cells
        let phis: Vec<f64> = (0..n)
            .map(|k| {
                let pos = (k as f64 + 0.5) * cells.len() as f64 / n as f64;
                let cell = (pos.floor() as usize).min(cells.len() - 1);
                cells[cell] + (pos - cell as f64 - 0.5) * h
            })
            .collect();
        let probes: Vec<Option<(f64, Direction, Probe)>> = phis
            .par_iter()
            .map(|&phi| {
                Ok(match ray_boundary(&query, &interior, &frame, phi, mm)? {
                    Some(u) => {
                        let pr = probe(triple, &perm.order, &u, mm)?;
                        Some((phi, u, pr))
                    }
                    None => None,
                })
            })
            .collect::<Result<_>>()?;
        let mut best: Option<(f64, f64)> = None;
        for (phi, u, pr) in probes.into_iter().flatten() {
            match pr {
                Probe::Sample(s) => {
                    if best.is_none_or(|b| s.margin < b.1) {
                        best = Some((phi, s.margin));
                    }
                    report.samples.push(*s);
                }
                Probe::Skip(reason) => report.skipped.push(FlexSkip {
                    order: perm.order.clone(),
                    direction: u,
                    reason,
                }),
            }
        }
        if let (true, Some((phi0, _))) = (opts.refine, best) {
            let w = std::f64::consts::TAU / n as f64;
            if let Some(s) = refine_margin(triple, &query, &interior, &frame, phi0 - w, phi0 + w, mm)? {
                report.samples.push(s);
            }
        }
    }
    for s in &report.samples {
        report.min_margin = report.min_margin.min(s.margin);
        report.min_disjointness_slack = report.min_disjointness_slack.min(s.disjointness_slack);
        report.max_hessian_gap = report.max_hessian_gap.max(s.hessian_gap);
    }
    report.pass = !report.samples.is_empty() && report.min_margin > MARGIN_FLOOR && report.min_disjointness_slack > 0.0;
    Ok(report)
}

/// Golden-section search for the smallest margin between two ray angles.
fn refine_margin(
    triple: &Triple,
    query: &OrderedQuery,
    interior: &Direction,
    frame: &[Vec<f64>],
    lo: f64,
    hi: f64,
    mm: &MinimaxOptions,
) -> Result<Option<FlexSample>> {
    let eval = |phi: f64| -> Result<Option<FlexSample>> {
        Ok(match ray_boundary(query, interior, frame, phi, mm)? {
            Some(u) => match probe(triple, query.order(), &u, mm)? {
                Probe::Sample(s) => Some(*s),
                Probe::Skip(_) => None,
            },
            None => None,
        })
    };
    let key = |s: &Option<FlexSample>| s.as_ref().map_or(f64::INFINITY, |s| s.margin);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..50 {
        if key(&f1) <= key(&f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(x2)?;
        }
    }
    Ok(if key(&f1) <= key(&f2) { f1 } else { f2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LiftedConfig {
        LiftedConfig::new(3.0, 1.0, 2.0, [0.2, 0.3, 0.5], [0.0, 1.5, -0.7]).unwrap()
    }

    #[test]
    fn weights_are_normalized() {
        let c = LiftedConfig::new(3.0, 1.0, 2.0, [2.0, 3.0, 5.0], [0.0; 3]).unwrap();
        assert!((c.p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((c.p[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gram_matches_coordinates() {
        let c = sample();
        let g = gram_from_barycentrics(&c);
        for i in 0..3 {
            for j in 0..3 {
                let (vi, vj) = (c.v(i), c.v(j));
                let direct = vi[0] * vj[0] + vi[1] * vj[1];
                assert!((g[i][j] - direct).abs() < 1e-12, "{i}{j}: {} vs {direct}", g[i][j]);
            }
        }
    }

    #[test]
    fn delta_equals_area_term() {
        let qi = q_invariant(&sample());
        assert!((qi.delta - qi.delta_direct).abs() < 1e-10 * qi.delta_direct);
        assert!(qi.nondegenerate);
    }

    #[test]
    fn decomposition_matches_sextic_hessian() {
        let gap = hessian_cross_check(&sample()).unwrap();
        assert!(gap < 1e-8, "{gap}");
    }

    #[test]
    fn star_h_splits_into_asymptotic_part_and_constant() {
        let c = sample();
        let k = CanonicalCoords::from_config(&c).unwrap();
        let w = k.w_of(&c);
        let s = star_h_canonical(&k, &w);
        assert!((s.value - s.asymptotic - s.constant).abs() < 1e-10 * (1.0 + s.value.abs()));
    }

    #[test]
    fn equal_q_plane_value() {
        let k = CanonicalCoords::from_q([1.0; 3]).unwrap();
        let cert = certify_octant_separation(&k);
        assert!((cert.plane_rhs - 9.0 / 8.0).abs() < 1e-14);
        assert!((cert.plane_slack - 15.0 / 8.0).abs() < 1e-14);
        assert!(cert.pass);
    }

    #[test]
    fn degenerate_q_is_a_boundary_case() {
        let k = CanonicalCoords::from_q([1.0, 2.0, 3.0]).unwrap();
        let cert = certify_octant_separation(&k);
        assert!(cert.boundary_case);
        assert!(cert.star_h_at_vertex.abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(LiftedConfig::new(0.0, 1.0, 1.0, [1.0; 3], [0.0; 3]).is_err());
        assert!(LiftedConfig::new(1.0, 1.0, 1.0, [1.0, -1.0, 1.0], [0.0; 3]).is_err());
        assert!(CanonicalCoords::from_q([0.0, 1.0, 1.0]).is_err());
    }
}
