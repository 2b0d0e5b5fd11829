//! Rational functions in `q1..qr, h` over the rationals.
//!
//! Canonical form: numerator and denominator are coprime, the denominator has
//! coprime integer coefficients and a positive (lex-)leading coefficient. Two
//! equal rational functions are therefore structurally equal.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Coeff, Grading, Homogeneity, Poly, ScalarError, Series, SeriesCtx};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    nq: usize,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Number of polynomial variables (`q1..qr` plus `h`).
    fn nvars(nq: usize) -> usize {
        nq + 1
    }

    pub fn from_poly(nq: usize, p: Poly) -> Self {
        debug_assert_eq!(p.nvars(), Self::nvars(nq));
        RatFunc { nq, num: p, den: Poly::one(Self::nvars(nq)) }
    }

    pub fn new(nq: usize, num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalize(nq, num, den))
    }

    fn normalize(nq: usize, num: Poly, den: Poly) -> Self {
        let n = Self::nvars(nq);
        if num.is_zero() {
            return RatFunc { nq, num: Poly::zero(n), den: Poly::one(n) };
        }
        if let Some(c) = den.constant_value() {
            return RatFunc { nq, num: num.scale(&c.recip()), den: Poly::one(n) };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let mut c = den.rational_content();
        if den.leading().map(|(_, lc)| lc.is_negative()).unwrap_or(false) {
            c = -c;
        }
        let inv = c.recip();
        RatFunc { nq, num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn num_q_vars(&self) -> usize {
        self.nq
    }

    fn h_index(&self) -> usize {
        self.nq
    }

    fn var_names(nq: usize) -> Vec<String> {
        let mut names: Vec<String> = (1..=nq).map(|i| format!("q{i}")).collect();
        names.push("h".to_string());
        names
    }

    /// The finite sum of the stored terms of a series (Laurent in `h`).
    pub fn from_series(s: &Series) -> Self {
        let nq = s.series_ctx().num_vars();
        let n = Self::nvars(nq);
        let min_h = s.terms().map(|(_, h, _)| h).min().unwrap_or(0).min(0);
        let num = Poly::from_terms(
            n,
            s.terms().map(|(q, h, c)| {
                let mut e = q.to_vec();
                e.push((h - min_h) as u32);
                (e, c.clone())
            }),
        );
        let mut den_exp = vec![0; n];
        den_exp[nq] = min_h.unsigned_abs();
        Self::normalize(nq, num, Poly::monomial(n, den_exp, BigRational::one()))
    }

    fn poly_to_series(&self, p: &Poly, ctx: &SeriesCtx) -> Series {
        Series::from_terms(
            ctx,
            p.terms().map(|(e, c)| (e[..self.nq].to_vec(), e[self.nq] as i32, c.clone())),
        )
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Self::var_names(self.nq);
        if self.den.is_one() {
            return self.num.fmt_with(f, &names);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num.to_string_with(&names))?;
        } else {
            self.num.fmt_with(f, &names)?;
        }
        // a bare variable power can follow '/' unparenthesised
        let bare = self.den.num_terms() == 1
            && self.den.leading().is_some_and(|(e, c)| c.is_one() && e.iter().filter(|&&k| k > 0).count() == 1);
        if bare {
            write!(f, "/{}", self.den.to_string_with(&names))
        } else {
            write!(f, "/({})", self.den.to_string_with(&names))
        }
    }
}

impl Coeff for RatFunc {
    type Ctx = usize;

    fn ctx(&self) -> usize {
        self.nq
    }

    fn num_q(ctx: &usize) -> usize {
        *ctx
    }

    fn zero(ctx: &usize) -> Self {
        RatFunc::from_poly(*ctx, Poly::zero(Self::nvars(*ctx)))
    }

    fn from_rational(ctx: &usize, r: BigRational) -> Self {
        RatFunc::from_poly(*ctx, Poly::constant(Self::nvars(*ctx), r))
    }

    fn q_var(ctx: &usize, i: usize) -> Self {
        RatFunc::from_poly(*ctx, Poly::var(Self::nvars(*ctx), i))
    }

    fn h_pow(ctx: &usize, k: i32) -> Self {
        let n = Self::nvars(*ctx);
        let mut e = vec![0; n];
        e[*ctx] = k.unsigned_abs();
        let m = Poly::monomial(n, e, BigRational::one());
        if k >= 0 {
            RatFunc::from_poly(*ctx, m)
        } else {
            RatFunc { nq: *ctx, num: Poly::one(n), den: m }
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            if self.den.is_one() {
                return RatFunc::from_poly(self.nq, self.num.add(&other.num));
            }
            return Self::normalize(self.nq, self.num.add(&other.num), self.den.clone());
        }
        Self::normalize(
            self.nq,
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.nq);
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(self.nq, self.num.mul(&other.num));
        }
        Self::normalize(self.nq, self.num.mul(&other.num), self.den.mul(&other.den))
    }

    fn neg(&self) -> Self {
        RatFunc { nq: self.nq, num: self.num.neg(), den: self.den.clone() }
    }

    fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero(&self.nq);
        }
        RatFunc { nq: self.nq, num: self.num.scale(r), den: self.den.clone() }
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalize(self.nq, self.den.clone(), self.num.clone()))
    }

    fn euler(&self, i: usize) -> Self {
        if self.den.is_one() {
            return RatFunc::from_poly(self.nq, self.num.euler(i));
        }
        let num = self.num.euler(i).mul(&self.den).sub(&self.num.mul(&self.den.euler(i)));
        Self::normalize(self.nq, num, self.den.mul(&self.den))
    }

    fn h_coefficients(&self) -> Result<BTreeMap<i32, Self>, ScalarError> {
        let hv = self.h_index();
        let den_parts = self.den.coefficients_in(hv);
        if den_parts.len() != 1 {
            return Err(ScalarError::NotLaurentInH(self.to_string()));
        }
        let (&shift, den_rest) = den_parts.iter().next().expect("one part");
        let mut out = BTreeMap::new();
        for (k, c) in self.num.coefficients_in(hv) {
            out.insert(k as i32 - shift as i32, Self::normalize(self.nq, c, den_rest.clone()));
        }
        Ok(out)
    }

    fn at_h_zero(&self) -> Result<Self, ScalarError> {
        let hv = self.h_index();
        let den0 = self.den.at_var_zero(hv);
        if den0.is_zero() {
            return Err(ScalarError::PoleAtHZero(self.to_string()));
        }
        Ok(Self::normalize(self.nq, self.num.at_var_zero(hv), den0))
    }

    fn at_q_zero(&self) -> Result<Self, ScalarError> {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for v in 0..self.nq {
            num = num.at_var_zero(v);
            den = den.at_var_zero(v);
        }
        if den.is_zero() {
            return Err(ScalarError::SingularAtOrigin(self.to_string()));
        }
        Ok(Self::normalize(self.nq, num, den))
    }

    fn is_h_free(&self) -> bool {
        !self.num.depends_on(self.nq) && !self.den.depends_on(self.nq)
    }

    fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    fn homogeneity(&self, grading: &Grading) -> Homogeneity {
        let deg = |p: &Poly| {
            Homogeneity::from_degrees(
                p.terms().map(|(e, _)| grading.degree_of(&e[..self.nq], e[self.nq] as i64)),
            )
        };
        match (deg(&self.num), deg(&self.den)) {
            (Homogeneity::Zero, _) => Homogeneity::Zero,
            (Homogeneity::Degree(a), Homogeneity::Degree(b)) => Homogeneity::Degree(a - b),
            _ => Homogeneity::Inhomogeneous,
        }
    }

    fn to_series(&self, ctx: &SeriesCtx) -> Result<Series, ScalarError> {
        if ctx.num_vars() != self.nq {
            return Err(ScalarError::ContextMismatch);
        }
        let num = self.poly_to_series(&self.num, ctx);
        if self.den.is_one() {
            return Ok(num);
        }
        let den = self.poly_to_series(&self.den, ctx);
        Ok(num.mul(&den.inv()?))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}
