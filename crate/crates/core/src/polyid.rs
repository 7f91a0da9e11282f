//! Exact rational replay of the algebraic identities behind the flex probe.
//!
//! Every identity is a rational-function identity `lhs = rhs` in a few
//! variables.  Evaluating both sides at random rational points from a finite
//! grid of size `N` per variable catches a false identity of numerator degree
//! `D` with probability at least `1 - D / N` per trial (Schwartz–Zippel).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TransversalError};
use crate::poly::{det3, Scalar};
use crate::sextic::sigma_polynomial;

pub type ExactScalar = BigRational;

fn int(n: i64) -> ExactScalar {
    ExactScalar::from_i64(n)
}

fn frac(n: i64, d: i64) -> ExactScalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `lhs` and `rhs` of an identity at one point.
pub type Sides = (ExactScalar, ExactScalar);

/// One identity: how to draw a point and how to evaluate both sides.
#[derive(Clone)]
pub struct IdentitySpec {
    pub name: &'static str,
    pub statement: &'static str,
    pub variables: Vec<&'static str>,
    /// Upper bound on the total degree of the cleared numerator of
    /// `lhs - rhs`.
    pub degree_bound: u32,
    /// Draws a point from a grid with `height` values per variable.
    pub sample: fn(&mut ChaCha8Rng, i64) -> Vec<ExactScalar>,
    pub domain: fn(&[ExactScalar]) -> Result<()>,
    pub sides: fn(&[ExactScalar]) -> Sides,
}

impl std::fmt::Debug for IdentitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentitySpec")
            .field("name", &self.name)
            .field("variables", &self.variables)
            .field("degree_bound", &self.degree_bound)
            .finish()
    }
}

/// `n / d` with `n, d` uniform in `1..=height`.
fn grid(rng: &mut ChaCha8Rng, height: i64) -> ExactScalar {
    frac(rng.random_range(1..=height), rng.random_range(1..=height))
}

/// `n / d` with `n` uniform in `-height..=height`, `d` in `1..=height`.
fn signed_grid(rng: &mut ChaCha8Rng, height: i64) -> ExactScalar {
    frac(rng.random_range(-height..=height), rng.random_range(1..=height))
}

fn positive(names: &[&str], v: &[ExactScalar]) -> Result<()> {
    for (n, x) in names.iter().zip(v) {
        if !x.is_positive() {
            return Err(TransversalError::DomainViolation(format!("{n} must be positive, got {x}")));
        }
    }
    Ok(())
}

// Lifted configuration: variables a, b, c, p1, p2, x0, x1, x2 with
// p0 = 1 - p1 - p2.

struct Lifted {
    a: ExactScalar,
    b: ExactScalar,
    c: ExactScalar,
    p: [ExactScalar; 3],
    x: [ExactScalar; 3],
}

impl Lifted {
    fn from_point(v: &[ExactScalar]) -> Self {
        let p0 = int(1) - &v[3] - &v[4];
        Self {
            a: v[0].clone(),
            b: v[1].clone(),
            c: v[2].clone(),
            p: [p0, v[3].clone(), v[4].clone()],
            x: [v[5].clone(), v[6].clone(), v[7].clone()],
        }
    }

    fn vertices(&self) -> [[ExactScalar; 2]; 3] {
        [
            [int(0), int(0)],
            [self.a.clone(), int(0)],
            [self.b.clone(), self.c.clone()],
        ]
    }

    fn v(&self, k: usize) -> [ExactScalar; 2] {
        let vs = self.vertices();
        [0, 1].map(|d| {
            let pt: ExactScalar = (0..3).map(|i| &self.p[i] * &vs[i][d]).sum();
            pt - &vs[k][d]
        })
    }

    fn s(&self) -> [ExactScalar; 3] {
        [0, 1, 2].map(|k| {
            let v = self.v(k);
            &v[0] * &v[0] + &v[1] * &v[1]
        })
    }

    /// `q_k^2 = p_k^2 s_k`.
    fn q2(&self) -> [ExactScalar; 3] {
        let s = self.s();
        [0, 1, 2].map(|k| &self.p[k] * &self.p[k] * &s[k])
    }

    fn z(&self) -> [ExactScalar; 3] {
        [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            let d = &self.x[i] - &self.x[j];
            &d * &d
        })
    }
}

fn others(k: usize) -> (usize, usize) {
    ((k + 1) % 3, (k + 2) % 3)
}

fn big_q_from_squares(q2: &[ExactScalar; 3]) -> ExactScalar {
    let two = int(2);
    &two * (&q2[0] * &q2[1] + &q2[1] * &q2[2] + &q2[2] * &q2[0])
        - (&q2[0] * &q2[0] + &q2[1] * &q2[1] + &q2[2] * &q2[2])
}

fn sample_lifted(rng: &mut ChaCha8Rng, height: i64) -> Vec<ExactScalar> {
    // rejection until p0 = 1 - p1 - p2 > 0
    let (p1, p2) = loop {
        let (p1, p2) = (grid(rng, height), grid(rng, height));
        if (&p1 + &p2) < int(1) {
            break (p1, p2);
        }
    };
    vec![
        grid(rng, height),
        signed_grid(rng, height),
        grid(rng, height),
        p1,
        p2,
        signed_grid(rng, height),
        signed_grid(rng, height),
        signed_grid(rng, height),
    ]
}

fn lifted_domain(v: &[ExactScalar]) -> Result<()> {
    if v.len() != 8 {
        return Err(TransversalError::DomainViolation(format!("expected 8 values, got {}", v.len())));
    }
    positive(&["a"], &v[0..1])?;
    positive(&["c"], &v[2..3])?;
    let l = Lifted::from_point(v);
    positive(&["p0", "p1", "p2"], &l.p)
}

fn master_sides(v: &[ExactScalar]) -> Sides {
    let l = Lifted::from_point(v);
    let vs = l.vertices();
    let centers = [0, 1, 2].map(|k| [vs[k][0].clone(), vs[k][1].clone(), l.x[k].clone()]);
    let sigma = sigma_polynomial(&centers, &l.s());
    let e3 = [int(0), int(0), int(1)];
    let first = [0, 1, 2].map(|i| sigma.derivative(i));
    let hess = [0, 1, 2].map(|i| [0, 1, 2].map(|j| first[i].derivative(j).eval(&e3)));
    let lhs = det3(&hess);

    let q2 = l.q2();
    let z = l.z();
    let ac2 = {
        let ac = &l.a * &l.c;
        &ac * &ac
    };
    let pprod = &l.p[0] * &l.p[1] * &l.p[2];
    let mut pair = int(0);
    let mut h4 = int(0);
    for k in 0..3 {
        let (i, j) = others(k);
        pair += &l.p[i] * &l.p[j] * &z[k];
        h4 += &l.p[k] * &q2[k] * &z[i] * &z[j];
    }
    let h2 = -(&ac2 * &pprod * &pair);
    let psum: ExactScalar = l.p.iter().cloned().sum();
    let prefactor = int(4096 * 25) * &ac2 * &ac2 * &ac2 / (&psum * &psum * &psum * &psum * &psum);
    (lhs, prefactor * (h2 + h4))
}

fn delta_q_sides(v: &[ExactScalar]) -> Sides {
    let l = Lifted::from_point(v);
    let ac = &l.a * &l.c;
    let pp = &l.p[0] * &l.p[1] * &l.p[2];
    let q = big_q_from_squares(&l.q2());
    (&ac * &ac, q / (int(4) * &pp * &pp))
}

/// All three off-diagonal entries; the first mismatch is returned.
fn gram_sides(v: &[ExactScalar]) -> Sides {
    let l = Lifted::from_point(v);
    let q2 = l.q2();
    for k in 0..3 {
        let (i, j) = others(k);
        let (vi, vj) = (l.v(i), l.v(j));
        let direct = &vi[0] * &vj[0] + &vi[1] * &vj[1];
        let formula = (&q2[k] - &q2[i] - &q2[j]) / (int(2) * &l.p[i] * &l.p[j]);
        if direct != formula {
            return (direct, formula);
        }
    }
    let (v1, v2) = (l.v(1), l.v(2));
    let direct = &v1[0] * &v2[0] + &v1[1] * &v2[1];
    (direct.clone(), direct)
}

fn sample_q(rng: &mut ChaCha8Rng, height: i64) -> Vec<ExactScalar> {
    (0..3).map(|_| grid(rng, height)).collect()
}

fn q_domain(v: &[ExactScalar]) -> Result<()> {
    if v.len() != 3 {
        return Err(TransversalError::DomainViolation(format!("expected 3 values, got {}", v.len())));
    }
    positive(&["q0", "q1", "q2"], v)
}

struct Canonical {
    q: [ExactScalar; 3],
    big_q: ExactScalar,
    alpha: [ExactScalar; 3],
}

impl Canonical {
    fn new(v: &[ExactScalar]) -> Self {
        let q = [v[0].clone(), v[1].clone(), v[2].clone()];
        let q2 = q.clone().map(|x| &x * &x);
        let big_q = big_q_from_squares(&q2);
        let alpha = [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            &big_q / (int(4) * &q2[i] * &q2[j])
        });
        Self { q, big_q, alpha }
    }

    fn star_h(&self, w: &[ExactScalar; 3]) -> ExactScalar {
        let pairs = &w[0] * &w[1] + &w[1] * &w[2] + &w[2] * &w[0];
        let lin: ExactScalar = (0..3).map(|k| &self.alpha[k] * &w[k]).sum();
        pairs - lin
    }

    fn vertex(&self) -> [ExactScalar; 3] {
        [0, 1, 2].map(|k| {
            let (i, j) = others(k);
            let r = (&self.q[i] - &self.q[j]) / &self.q[k];
            int(1) - &r * &r
        })
    }

    fn q2_product(&self) -> ExactScalar {
        self.q.iter().map(|x| x * x).fold(int(1), |acc, y| acc * y)
    }
}

fn beta_sides(v: &[ExactScalar]) -> Sides {
    let c = Canonical::new(v);
    let beta = [0, 1, 2].map(|k| {
        let (i, j) = others(k);
        (&c.alpha[i] + &c.alpha[j] - &c.alpha[k]) / int(2)
    });
    let lhs = &beta[0] * &beta[1] + &beta[1] * &beta[2] + &beta[2] * &beta[0];
    let p = c.q2_product();
    let rhs = &c.big_q * &c.big_q * &c.big_q / (int(64) * &p * &p);
    (lhs, rhs)
}

fn vertex_sides(v: &[ExactScalar]) -> Sides {
    let c = Canonical::new(v);
    let lhs = c.star_h(&c.vertex());
    let num: ExactScalar = (0..3)
        .map(|k| {
            let (i, j) = others(k);
            let f = &c.q[i] + &c.q[j] - &c.q[k];
            &f * &f
        })
        .fold(int(1), |acc, y| acc * y);
    (lhs, int(3) * num / (int(4) * c.q2_product()))
}

fn sample_single(rng: &mut ChaCha8Rng, height: i64) -> Vec<ExactScalar> {
    vec![grid(rng, height)]
}

fn single_domain(v: &[ExactScalar]) -> Result<()> {
    if v.len() != 1 {
        return Err(TransversalError::DomainViolation(format!("expected 1 value, got {}", v.len())));
    }
    positive(&["q"], v)
}

fn plane_sides(v: &[ExactScalar]) -> Sides {
    let c = Canonical::new(&[v[0].clone(), v[0].clone(), v[0].clone()]);
    let sum_v: ExactScalar = c.vertex().into_iter().sum();
    let sum_q2: ExactScalar = c.q.iter().map(|x| x * x).sum();
    let plane = sum_v - &c.big_q * sum_q2 / (int(8) * c.q2_product());
    (plane, frac(15, 8))
}

/// The six identities.
pub fn identity_catalog() -> Vec<IdentitySpec> {
    let lifted_vars = vec!["a", "b", "c", "p1", "p2", "x0", "x1", "x2"];
    vec![
        IdentitySpec {
            name: "master-hessian",
            statement: "H(sigma)(0,0,1) = 2^12 5^2 a^6 c^6 / (sum p)^5 * (H2 + H4)",
            variables: lifted_vars.clone(),
            // Hessian of a degree-16 Cayley determinant against a degree-23
            // right-hand side
            degree_bound: 48,
            sample: sample_lifted,
            domain: lifted_domain,
            sides: master_sides,
        },
        IdentitySpec {
            name: "delta-q",
            statement: "a^2 c^2 = Q / (4 prod p_k^2)",
            variables: lifted_vars.clone(),
            degree_bound: 24,
            sample: sample_lifted,
            domain: lifted_domain,
            sides: delta_q_sides,
        },
        IdentitySpec {
            name: "gram",
            statement: "<v_i, v_j> = (q_k^2 - q_i^2 - q_j^2) / (2 p_i p_j)",
            variables: lifted_vars,
            degree_bound: 12,
            sample: sample_lifted,
            domain: lifted_domain,
            sides: gram_sides,
        },
        IdentitySpec {
            name: "beta-pairs",
            statement: "sum beta_i beta_j = Q^3 / (4^3 prod q_k^4)",
            variables: vec!["q0", "q1", "q2"],
            degree_bound: 24,
            sample: sample_q,
            domain: q_domain,
            sides: beta_sides,
        },
        IdentitySpec {
            name: "vertex-factorization",
            statement: "*H(V) = 3 prod (q_i + q_j - q_k)^2 / (4 prod q_k^2)",
            variables: vec!["q0", "q1", "q2"],
            degree_bound: 24,
            sample: sample_q,
            domain: q_domain,
            sides: vertex_sides,
        },
        IdentitySpec {
            name: "symmetric-plane",
            statement: "sum V_k - Q sum q_k^2 / (8 prod q_k^2) = 15/8 at q0 = q1 = q2",
            variables: vec!["q"],
            degree_bound: 12,
            sample: sample_single,
            domain: single_domain,
            sides: plane_sides,
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub identity: String,
    pub point: Vec<(String, String)>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs: ExactScalar,
    pub rhs: ExactScalar,
}

/// Exact comparison at one point; domain violations are errors.
pub fn check_identity(spec: &IdentitySpec, point: &[ExactScalar]) -> Result<IdentityCheck> {
    (spec.domain)(point)?;
    let (lhs, rhs) = (spec.sides)(point);
    Ok(IdentityCheck {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

fn witness(spec: &IdentitySpec, point: &[ExactScalar], check: &IdentityCheck) -> Witness {
    Witness {
        identity: spec.name.to_string(),
        point: spec
            .variables
            .iter()
            .zip(point)
            .map(|(n, x)| (n.to_string(), x.to_string()))
            .collect(),
        lhs: check.lhs.to_string(),
        rhs: check.rhs.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub statement: String,
    pub trials: usize,
    pub passed: usize,
    pub degree_bound: u32,
    /// Chance that a false identity survives all trials, at most
    /// `(D / height)^trials`, given as its base-10 logarithm.
    pub log10_escape_bound: f64,
    pub witnesses: Vec<Witness>,
}

impl IdentityResult {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub trials: usize,
    pub height: i64,
    pub seed: u64,
    pub identities: Vec<IdentityResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.identities.iter().filter(|r| r.ok()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.identities.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

pub fn run_identity(spec: &IdentitySpec, trials: usize, height: i64, seed: u64) -> Result<IdentityResult> {
    if height < 2 {
        return Err(TransversalError::InvalidParameter(format!("height must be at least 2, got {height}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result = IdentityResult {
        name: spec.name.to_string(),
        statement: spec.statement.to_string(),
        trials,
        passed: 0,
        degree_bound: spec.degree_bound,
        log10_escape_bound: trials as f64 * (spec.degree_bound as f64 / height as f64).min(1.0).log10(),
        witnesses: Vec::new(),
    };
    for _ in 0..trials {
        let point = (spec.sample)(&mut rng, height);
        let check = check_identity(spec, &point)?;
        if check.holds {
            result.passed += 1;
        } else if result.witnesses.len() < 5 {
            result.witnesses.push(witness(spec, &point, &check));
        }
    }
    Ok(result)
}

/// Runs every identity of the catalog on `trials` random points.
pub fn schwartz_zippel_suite(trials: usize, height: i64, seed: u64) -> Result<SuiteReport> {
    let identities = identity_catalog()
        .iter()
        .enumerate()
        .map(|(k, spec)| run_identity(spec, trials, height, seed.wrapping_add(k as u64)))
        .collect::<Result<_>>()?;
    Ok(SuiteReport {
        trials,
        height,
        seed,
        identities,
    })
}

/// Exact value of a rational as `f64`, for reporting.
pub fn to_f64(x: &ExactScalar) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_holds_on_a_few_points() {
        let report = schwartz_zippel_suite(3, 1000, 11).unwrap();
        for r in &report.identities {
            assert!(r.ok(), "{}: {:?}", r.name, r.witnesses);
        }
    }

    #[test]
    fn mutated_constant_is_caught() {
        let mut spec = identity_catalog().remove(0);
        fn wrong(v: &[ExactScalar]) -> Sides {
            let (l, r) = master_sides(v);
            (l, r * frac(5, 4))
        }
        spec.sides = wrong;
        let r = run_identity(&spec, 3, 1000, 2).unwrap();
        assert_eq!(r.passed, 0);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn domain_violation_is_an_error() {
        let spec = &identity_catalog()[3];
        assert!(check_identity(spec, &[int(1), int(0), int(1)]).is_err());
        assert!(check_identity(spec, &[int(1)]).is_err());
    }

    #[test]
    fn vertex_factorization_mutation_is_caught() {
        let mut spec = identity_catalog().remove(4);
        fn wrong(v: &[ExactScalar]) -> Sides {
            let (l, r) = vertex_sides(v);
            // coefficient 3 replaced by 2
            (l, r * frac(2, 3))
        }
        spec.sides = wrong;
        let c = check_identity(&spec, &[int(1), int(1), int(1)]).unwrap();
        assert!(!c.holds);
        assert_eq!(c.lhs, frac(3, 4));
    }

    #[test]
    fn plane_value_is_exact() {
        let spec = &identity_catalog()[5];
        let c = check_identity(spec, &[frac(7, 3)]).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, frac(15, 8));
    }
}
