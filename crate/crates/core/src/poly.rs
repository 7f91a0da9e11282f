//! Sparse polynomials in three variables over a generic coefficient field.
//!
//! The same code path serves floating-point expansion of the sextic and the
//! exact rational replay in [`crate::polyid`]; only the scalar type differs.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficient field used by [`TernaryPoly`].
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
}

/// Exponent vector `(e1, e2, e3)` of the monomial `u1^e1 u2^e2 u3^e3`.
pub type Exponent = [u32; 3];

/// A polynomial in `(u1, u2, u3)` stored as a sparse monomial map.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryPoly<T: Scalar> {
    terms: BTreeMap<Exponent, T>,
}

impl<T: Scalar> Default for TernaryPoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> TernaryPoly<T> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(exp: Exponent, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The linear form `l1 u1 + l2 u2 + l3 u3`.
    pub fn linear(coeffs: [T; 3]) -> Self {
        let mut p = Self::zero();
        for (k, c) in coeffs.into_iter().enumerate() {
            let mut e = [0; 3];
            e[k] = 1;
            p.add_term(e, c);
        }
        p
    }

    /// `q(u) = u1^2 + u2^2 + u3^2`.
    pub fn squared_norm_form() -> Self {
        let mut p = Self::zero();
        p.add_term([2, 0, 0], T::one());
        p.add_term([0, 2, 0], T::one());
        p.add_term([0, 0, 2], T::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: Exponent) -> T {
        self.terms.get(&exp).cloned().unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exp: Exponent, c: T) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&exp) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(exp, sum);
        }
    }

    /// Largest total degree among nonzero terms, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max()
    }

    /// Homogeneous of the given degree (the zero polynomial qualifies).
    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e[0] + e[1] + e[2] == degree)
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v.clone() * c.clone());
        }
        out
    }

    pub fn eval(&self, u: &[T; 3]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for k in 0..3 {
                for _ in 0..e[k] {
                    m = m * u[k].clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Formal partial derivative with respect to `u_{var+1}`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = *e;
            ne[var] -= 1;
            out.add_term(ne, c.clone() * T::from_i64(i64::from(e[var])));
        }
        out
    }
}

impl<T: Scalar> Add for &TernaryPoly<T> {
    type Output = TernaryPoly<T>;
    fn add(self, rhs: &TernaryPoly<T>) -> TernaryPoly<T> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &TernaryPoly<T> {
    type Output = TernaryPoly<T>;
    fn sub(self, rhs: &TernaryPoly<T>) -> TernaryPoly<T> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<T: Scalar> Mul for &TernaryPoly<T> {
    type Output = TernaryPoly<T>;
    fn mul(self, rhs: &TernaryPoly<T>) -> TernaryPoly<T> {
        let mut out = TernaryPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &TernaryPoly<T> {
    type Output = TernaryPoly<T>;
    fn neg(self) -> TernaryPoly<T> {
        self.scale(&-T::one())
    }
}

/// Determinant of a square matrix by cofactor expansion along the first row.
///
/// Works over any commutative ring with `Clone + Add + Sub + Mul`, which is all
/// the 5x5 Cayley matrix of polynomial entries needs.
pub fn cofactor_det<R, F>(m: &[Vec<R>], zero: &R, is_zero: F) -> R
where
    R: Clone,
    for<'a> &'a R: Add<&'a R, Output = R> + Sub<&'a R, Output = R> + Mul<&'a R, Output = R>,
    F: Fn(&R) -> bool + Copy,
{
    let n = m.len();
    match n {
        0 => unreachable!("empty matrix"),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = zero.clone();
            for col in 0..n {
                if is_zero(&m[0][col]) {
                    continue;
                }
                let minor: Vec<Vec<R>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let sub = cofactor_det(&minor, zero, is_zero);
                if is_zero(&sub) {
                    continue;
                }
                let term = &m[0][col] * &sub;
                acc = if col % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
    }
}

/// Determinant of a 3x3 matrix over any scalar.
pub fn det3<T: Scalar>(m: &[[T; 3]; 3]) -> T {
    let c = |i: usize, j: usize| m[i][j].clone();
    c(0, 0) * (c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1)) - c(0, 1) * (c(1, 0) * c(2, 2) - c(1, 2) * c(2, 0))
        + c(0, 2) * (c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0))
}
