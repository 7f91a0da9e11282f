//! Deterministic and random sampling of `S^{d-1}`, geodesics and caps.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use super::vec;
use super::Direction;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653_3; // pi (3 - sqrt 5)

/// Fibonacci lattice with `n` points on `S^2`.
pub fn fibonacci_sphere(n: usize) -> Vec<Direction> {
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = GOLDEN_ANGLE * i as f64;
            Direction::new(vec![rho * phi.cos(), rho * phi.sin(), z]).expect("unit")
        })
        .collect()
}

/// Quasi-uniform deterministic point set on `S^{d-1}`.
///
/// `d = 2` uses equal angles, `d = 3` the Fibonacci lattice; higher
/// dimensions push a Kronecker sequence (generalized golden ratio) through the
/// Gaussian quantile function and normalize.
pub fn quasi_uniform_sphere(d: usize, n: usize) -> Vec<Direction> {
    match d {
        2 => (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
                Direction::new(vec![a.cos(), a.sin()]).expect("unit")
            })
            .collect(),
        3 => fibonacci_sphere(n),
        _ => {
            let alpha = kronecker_alphas(d);
            let normal = Normal::standard();
            (0..n)
                .map(|i| {
                    let v: Vec<f64> = alpha
                        .iter()
                        .map(|a| {
                            let frac = (0.5 + a * (i as f64 + 1.0)).fract();
                            normal.inverse_cdf(frac.clamp(1e-12, 1.0 - 1e-12))
                        })
                        .collect();
                    Direction::new(v).expect("nonzero gaussian vector")
                })
                .collect()
        }
    }
}

/// `1/phi_d^k` where `phi_d` is the unique positive root of `x^(d+1) = x + 1`.
fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|k| g.powi(-(k as i32))).collect()
}

/// Surface area of `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    // 2 pi^(d/2) / Gamma(d/2)
    let half = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / statrs::function::gamma::gamma(half)
}

/// Typical nearest-neighbour spacing of `n` quasi-uniform points on `S^{d-1}`.
pub fn lattice_spacing(d: usize, n: usize) -> f64 {
    (sphere_area(d) / n as f64).powf(1.0 / (d as f64 - 1.0))
}

/// Midpoint of the shorter great-circle arc; `None` for antipodal inputs.
pub fn geodesic_midpoint(u: &Direction, v: &Direction) -> Option<Direction> {
    let s = vec::add(u.components(), v.components());
    if vec::norm(&s) < 1e-12 {
        return None;
    }
    Direction::new(s).ok()
}

/// Point at fraction `s` of the shorter great-circle arc from `u` to `v`.
pub fn great_circle_point(u: &Direction, v: &Direction, s: f64) -> Option<Direction> {
    let theta = u.angle_to(v);
    if theta < 1e-15 {
        return Some(u.clone());
    }
    if (std::f64::consts::PI - theta) < 1e-12 {
        return None;
    }
    let a = ((1.0 - s) * theta).sin() / theta.sin();
    let b = (s * theta).sin() / theta.sin();
    let p: Vec<f64> = u
        .components()
        .iter()
        .zip(v.components())
        .map(|(x, y)| a * x + b * y)
        .collect();
    Direction::new(p).ok()
}

/// Moves `u` by angle `theta` along the unit tangent `t` (`t ⊥ u`).
pub fn exp_map(u: &Direction, tangent: &[f64], theta: f64) -> Direction {
    let p: Vec<f64> = u
        .components()
        .iter()
        .zip(tangent)
        .map(|(x, t)| theta.cos() * x + theta.sin() * t)
        .collect();
    Direction::new(p).expect("unit combination")
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Direction {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = Direction::new(v) {
            return u;
        }
    }
}

/// Random unit tangent vector at `u`.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, u: &Direction) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..u.dimension()).map(|_| rng.sample(StandardNormal)).collect();
        let c = vec::dot(&v, u.components());
        vec::axpy(&mut v, -c, u.components());
        if let Some(t) = vec::normalized(&v) {
            return t;
        }
    }
}

/// Direction drawn uniformly in angle (not area) within `radius` of `center`.
pub fn random_in_cap<R: Rng + ?Sized>(rng: &mut R, center: &Direction, radius: f64) -> Direction {
    let t = random_tangent(rng, center);
    let theta = radius * rng.random::<f64>();
    exp_map(center, &t, theta)
}

/// Haar-random orthogonal `d x d` matrix (rows), from Gram-Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for r in &rows {
            let c = vec::dot(&v, r);
            vec::axpy(&mut v, -c, r);
        }
        if let Some(n) = vec::normalized(&v) {
            rows.push(n);
        }
    }
    rows
}

pub fn apply(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| vec::dot(r, x)).collect()
}
