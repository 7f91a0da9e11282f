//! Seeded generation of disjoint test scenes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sphere::{random_direction, random_tangent};
use super::{vec, Ball, Direction, Scene};
use crate::error::{Result, TransversalError};

/// Required gap between any two generated balls.
pub const DISJOINT_MARGIN: f64 = 1e-6;
const ATTEMPTS_PER_BALL: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneRequest {
    pub n: usize,
    pub d: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub seed: u64,
    /// Place the centers near a random line so that the scene has a
    /// transversal with a known direction.
    pub with_transversal: bool,
    /// Half-width of the sampling box (or half-length of the line segment).
    /// `None` picks a size that keeps rejection rates low.
    pub extent: Option<f64>,
}

impl SceneRequest {
    pub fn new(n: usize, d: usize, r_min: f64, r_max: f64, seed: u64) -> Self {
        Self {
            n,
            d,
            r_min,
            r_max,
            seed,
            with_transversal: false,
            extent: None,
        }
    }

    pub fn with_transversal(mut self) -> Self {
        self.with_transversal = true;
        self
    }

    pub fn extent(mut self, extent: f64) -> Self {
        self.extent = Some(extent);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedScene {
    pub scene: Scene,
    /// Direction of the construction line when `with_transversal` was set,
    /// oriented so that it realizes `construction_order`.
    pub construction_direction: Option<Direction>,
    pub construction_order: Option<Vec<usize>>,
    pub attempts: usize,
}

pub fn random_disjoint_scene(req: &SceneRequest) -> Result<GeneratedScene> {
    if req.n == 0 || req.d < 2 || !(req.r_min > 0.0) || req.r_max < req.r_min {
        return Err(TransversalError::InvalidParameter(format!(
            "need n >= 1, d >= 2, 0 < r_min <= r_max; got n={}, d={}, radii=[{}, {}]",
            req.n, req.d, req.r_min, req.r_max
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    if req.with_transversal {
        along_line(req, &mut rng)
    } else {
        in_box(req, &mut rng)
    }
}

fn radius(req: &SceneRequest, rng: &mut ChaCha8Rng) -> f64 {
    if req.r_max > req.r_min {
        rng.random_range(req.r_min..=req.r_max)
    } else {
        req.r_min
    }
}

fn fits(balls: &[Ball], center: &[f64], r: f64) -> bool {
    balls
        .iter()
        .all(|b| vec::dist(&b.center, center) - b.radius - r >= DISJOINT_MARGIN)
}

fn in_box(req: &SceneRequest, rng: &mut ChaCha8Rng) -> Result<GeneratedScene> {
    let extent = req
        .extent
        .unwrap_or_else(|| 2.0 * req.r_max * (req.n as f64).powf(1.0 / req.d as f64) + 2.0 * req.r_max);
    let mut balls: Vec<Ball> = Vec::with_capacity(req.n);
    let mut attempts = 0;
    while balls.len() < req.n {
        let r = radius(req, rng);
        let mut placed = false;
        for _ in 0..ATTEMPTS_PER_BALL {
            attempts += 1;
            let c: Vec<f64> = (0..req.d).map(|_| rng.random_range(-extent..=extent)).collect();
            if fits(&balls, &c, r) {
                balls.push(Ball { center: c, radius: r });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(TransversalError::GeneratorExhausted {
                attempts,
                diagnostics: format!("placed {} of {} balls in box of half-width {extent}", balls.len(), req.n),
            });
        }
    }
    Ok(GeneratedScene {
        scene: Scene::new(req.d, balls)?,
        construction_direction: None,
        construction_order: None,
        attempts,
    })
}

fn along_line(req: &SceneRequest, rng: &mut ChaCha8Rng) -> Result<GeneratedScene> {
    let half = req
        .extent
        .unwrap_or_else(|| 1.5 * req.r_max * req.n as f64 + 2.0 * req.r_max);
    let w = random_direction(rng, req.d);
    let base: Vec<f64> = (0..req.d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut placed: Vec<(f64, Ball)> = Vec::with_capacity(req.n);
    let mut attempts = 0;
    while placed.len() < req.n {
        let r = radius(req, rng);
        let mut ok = false;
        for _ in 0..ATTEMPTS_PER_BALL {
            attempts += 1;
            let s = rng.random_range(-half..=half);
            // offset from the line strictly inside the ball
            let off = random_tangent(rng, &w);
            let rho = 0.7 * r * rng.random::<f64>();
            let mut c = base.clone();
            vec::axpy(&mut c, s, w.components());
            vec::axpy(&mut c, rho, &off);
            let others: Vec<Ball> = placed.iter().map(|(_, b)| b.clone()).collect();
            if fits(&others, &c, r) {
                placed.push((s, Ball { center: c, radius: r }));
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(TransversalError::GeneratorExhausted {
                attempts,
                diagnostics: format!("placed {} of {} balls along a line of half-length {half}", placed.len(), req.n),
            });
        }
    }
    // Random labels, so that the scene order is not the construction order.
    let mut labels: Vec<usize> = (0..req.n).collect();
    labels.shuffle(rng);
    let mut balls = vec![Ball { center: vec![], radius: 1.0 }; req.n];
    let mut keys = vec![0.0; req.n];
    for (k, (s, b)) in placed.into_iter().enumerate() {
        balls[labels[k]] = b;
        keys[labels[k]] = s;
    }
    let mut order: Vec<usize> = (0..req.n).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    Ok(GeneratedScene {
        scene: Scene::new(req.d, balls)?,
        construction_direction: Some(w),
        construction_order: Some(order),
        attempts,
    })
}
