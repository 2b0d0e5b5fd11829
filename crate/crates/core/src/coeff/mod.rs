//! Exact scalar arithmetic.
//!
//! Two coefficient rings implement [`Coeff`]:
//!
//! * [`RatFunc`]: rational functions in `q1..qr` and `h`, canonically reduced.
//! * [`Series`]: graded power series in `q1..qr`, truncated at a total weight,
//!   with Laurent-polynomial dependence on `h`.
//!
//! Everything downstream (operators, matrices, gauge data) is generic over the
//! ring, so the same code runs in exact and in truncated mode.

mod poly;
mod ratfunc;
mod series;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

pub use poly::{Exponent, Poly};
pub use ratfunc::RatFunc;
pub use series::{Series, SeriesCtx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("constant term {0} is not a unit (must be c*h^k)")]
    NonUnitConstantTerm(String),
    #[error("square root needs constant term 1, found {0}")]
    NonUnitRadicand(String),
    #[error("substituted series for variable {0} has a nonzero constant term")]
    NonvanishingConstant(usize),
    #[error("substituted series for variable {0} has weight below the variable it replaces")]
    PrecisionLoss(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("h-pole does not vanish in the limit h -> 0: {0}")]
    PoleAtHZero(String),
    #[error("not a Laurent polynomial in h: {0}")]
    NotLaurentInH(String),
    #[error("value is singular at q = 0: {0}")]
    SingularAtOrigin(String),
    #[error("series operands have incompatible variable weights")]
    ContextMismatch,
}

/// Degree bookkeeping: `|h| = 2`, `|q_i|` user supplied (possibly zero or negative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    q_degrees: Vec<i64>,
}

impl Grading {
    pub const H_DEGREE: i64 = 2;
    /// Weight of each `∂_i` in the monomial order.
    pub const OPERATOR_WEIGHT: u32 = 1;

    pub fn new(q_degrees: Vec<i64>) -> Self {
        Grading { q_degrees }
    }

    pub fn q_degrees(&self) -> &[i64] {
        &self.q_degrees
    }

    pub fn num_vars(&self) -> usize {
        self.q_degrees.len()
    }

    pub fn degree_of(&self, q_exp: &[u32], h_exp: i64) -> i64 {
        q_exp.iter().zip(&self.q_degrees).map(|(&e, &d)| e as i64 * d).sum::<i64>() + Self::H_DEGREE * h_exp
    }

    /// Truncation weight of each variable: `max(|q_i|, 1)`.
    pub fn truncation_weights(&self) -> Vec<u32> {
        self.q_degrees.iter().map(|&d| d.max(1) as u32).collect()
    }

    pub fn all_at_least(&self, bound: i64) -> bool {
        self.q_degrees.iter().all(|&d| d >= bound)
    }
}

/// Result of a homogeneity query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Degree(i64),
    Inhomogeneous,
}

impl Homogeneity {
    /// Combine the degrees of individual terms.
    pub fn from_degrees(degrees: impl IntoIterator<Item = i64>) -> Self {
        let mut out = Homogeneity::Zero;
        for d in degrees {
            out = match out {
                Homogeneity::Zero => Homogeneity::Degree(d),
                Homogeneity::Degree(e) if e == d => out,
                _ => return Homogeneity::Inhomogeneous,
            };
        }
        out
    }

    /// True if zero or of degree `d`.
    pub fn admits(self, d: i64) -> bool {
        matches!(self, Homogeneity::Zero) || self == Homogeneity::Degree(d)
    }
}

/// A commutative coefficient ring containing `Q[q1..qr, h, 1/h]`.
///
/// `h` is central and every `q_i` carries the logarithmic derivation
/// [`Coeff::euler`] (`q_i d/dq_i`).
pub trait Coeff: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    type Ctx: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn num_q(ctx: &Self::Ctx) -> usize;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, r: BigRational) -> Self;
    fn q_var(ctx: &Self::Ctx, i: usize) -> Self;
    fn h_pow(ctx: &Self::Ctx, k: i32) -> Self;

    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_rational(ctx, BigRational::from_integer(1.into()))
    }

    fn from_int(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_rational(ctx, BigRational::from_integer(n.into()))
    }

    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one(&self.ctx())
    }

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, ScalarError>;

    fn scale(&self, r: &BigRational) -> Self {
        self.mul(&Self::from_rational(&self.ctx(), r.clone()))
    }

    fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    /// `q_i d/dq_i`.
    fn euler(&self, i: usize) -> Self;

    /// Laurent decomposition in `h`: `self = sum_k h^k c_k` with `h`-free `c_k`.
    fn h_coefficients(&self) -> Result<BTreeMap<i32, Self>, ScalarError>;

    /// Limit `h -> 0`.
    fn at_h_zero(&self) -> Result<Self, ScalarError>;

    /// Value at `q = 0`.
    fn at_q_zero(&self) -> Result<Self, ScalarError>;

    fn is_h_free(&self) -> bool;

    /// The value as a rational number, if it is constant.
    fn as_rational(&self) -> Option<BigRational>;

    fn homogeneity(&self, grading: &Grading) -> Homogeneity;

    fn to_series(&self, ctx: &SeriesCtx) -> Result<Series, ScalarError>;

    fn to_json(&self) -> serde_json::Value;

    /// Display without truncation markers.
    fn plain(&self) -> String {
        self.to_string()
    }
}
