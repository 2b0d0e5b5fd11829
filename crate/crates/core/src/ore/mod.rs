//! Operators in the logarithmic derivatives `∂_i = q_i d/dq_i` over a
//! coefficient ring, stored in normal order (coefficients on the left).
//!
//! Monomials are recorded in the rescaled generators `D_i = h ∂_i`, which
//! satisfy `D_i f = f D_i + h θ_i(f)` with `θ_i = q_i d/dq_i`. Working with
//! `D_i` keeps homogeneous operators free of negative powers of `h`.
//!
//! The same container also represents commutative polynomials in `b_i`
//! (the symbols of `D_i`); which product applies is chosen by [`Mode`].

mod groebner;
mod symbol;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::{Coeff, Grading, Homogeneity, Poly, RatFunc, ScalarError};

pub use groebner::{buchberger, GroebnerBasis, GroebnerError, Staircase, DEFAULT_STEP_CAP};
pub use symbol::{check_quantization, symbol, symbols, QuantizationReport};

/// Exponent vector of `D_1^{a_1} ... D_r^{a_r}`, ordered by graded reverse
/// lexicographic order with `D_1 > ... > D_r`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DMono(pub Vec<u32>);

impl DMono {
    pub fn one(r: usize) -> Self {
        DMono(vec![0; r])
    }

    pub fn var(r: usize, i: usize) -> Self {
        let mut e = vec![0; r];
        e[i] = 1;
        DMono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn divides(&self, other: &DMono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &DMono) -> DMono {
        DMono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &DMono) -> DMono {
        DMono(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &DMono) -> DMono {
        DMono(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &DMono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Index of the single variable this monomial is a power of, if any.
    pub fn pure_power_of(&self) -> Option<usize> {
        let mut support = self.0.iter().enumerate().filter(|(_, &e)| e > 0);
        let first = support.next()?;
        support.next().is_none().then_some(first.0)
    }

    /// `D^a` written as a product of named generators, e.g. `d1^2*d2`.
    pub fn fmt_named(&self, prefix: &str) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("{prefix}{}", i + 1)),
                _ => parts.push(format!("{prefix}{}^{}", i + 1, e)),
            }
        }
        parts.join("*")
    }
}

impl Ord for DMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    // smaller exponent in the last differing variable wins
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for DMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which product the container carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Noncommutative: `D_i f = f D_i + h θ_i(f)`.
    Ore,
    /// Commutative polynomials in the symbols `b_i`.
    Commutative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operator<C: Coeff> {
    ctx: C::Ctx,
    nvars: usize,
    terms: BTreeMap<DMono, C>,
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// All exponent vectors `j` with `0 <= j <= a` componentwise.
fn sub_exponents(a: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &e in a {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for prefix in &out {
            for k in 0..=e {
                let mut v = prefix.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl<C: Coeff> Operator<C> {
    pub fn zero(ctx: &C::Ctx, nvars: usize) -> Self {
        Operator { ctx: ctx.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn from_coeff(c: C, nvars: usize) -> Self {
        Self::monomial(c, DMono::one(nvars))
    }

    pub fn monomial(c: C, m: DMono) -> Self {
        let mut out = Operator { ctx: c.ctx(), nvars: m.0.len(), terms: BTreeMap::new() };
        out.add_term(m, c);
        out
    }

    /// `D_i = h ∂_i`.
    pub fn d(ctx: &C::Ctx, nvars: usize, i: usize) -> Self {
        Self::monomial(C::one(ctx), DMono::var(nvars, i))
    }

    pub fn from_terms(ctx: &C::Ctx, nvars: usize, terms: impl IntoIterator<Item = (DMono, C)>) -> Self {
        let mut out = Self::zero(ctx, nvars);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&DMono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &DMono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(|| C::zero(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: DMono, c: C) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                let v = slot.add(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *slot = v;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn leading(&self) -> Option<(&DMono, &C)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&DMono> {
        self.terms.keys().next_back()
    }

    /// Largest `|a|` among the monomials (the order of the operator).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(DMono::degree).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Operator {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    /// `c * self` (coefficient on the left, so no reordering is needed).
    pub fn scale_left(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx, self.nvars);
        }
        let mut out = Self::zero(&self.ctx, self.nvars);
        for (m, d) in &self.terms {
            out.add_term(m.clone(), c.mul(d));
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        Operator {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(r))).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `D^m * self` in the given mode.
    pub fn mul_monomial_left(&self, m: &DMono, mode: Mode) -> Self {
        if m.degree() == 0 {
            return self.clone();
        }
        match mode {
            Mode::Commutative => Operator {
                ctx: self.ctx.clone(),
                nvars: self.nvars,
                terms: self.terms.iter().map(|(b, c)| (m.mul(b), c.clone())).collect(),
            },
            Mode::Ore => Self::monomial(C::one(&self.ctx), m.clone()).mul(self, Mode::Ore),
        }
    }

    /// Product `self * other`, normal-ordered.
    pub fn mul(&self, other: &Self, mode: Mode) -> Self {
        let mut out = Self::zero(&self.ctx, self.nvars);
        for (a, c) in &self.terms {
            let shifts = match mode {
                Mode::Commutative => vec![vec![0; self.nvars]],
                Mode::Ore => sub_exponents(&a.0),
            };
            for (b, d) in &other.terms {
                for j in &shifts {
                    // coefficient prod binom(a_i, j_i) * h^{|j|} * θ^j(d)
                    let mut t = d.clone();
                    let mut bin = BigInt::from(1);
                    for (i, &ji) in j.iter().enumerate() {
                        for _ in 0..ji {
                            t = t.euler(i);
                        }
                        bin *= binomial(a.0[i], ji);
                    }
                    if t.is_zero() {
                        continue;
                    }
                    let hj: u32 = j.iter().sum();
                    if hj > 0 {
                        t = t.mul(&C::h_pow(&self.ctx, hj as i32));
                    }
                    let t = c.mul(&t).scale(&BigRational::from_integer(bin));
                    let mono = DMono(a.0.iter().zip(j).zip(&b.0).map(|((x, y), z)| x - y + z).collect());
                    out.add_term(mono, t);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32, mode: Mode) -> Self {
        let mut acc = Self::from_coeff(C::one(&self.ctx), self.nvars);
        for _ in 0..n {
            acc = acc.mul(self, mode);
        }
        acc
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Result<Self, ScalarError> {
        match self.leading() {
            None => Ok(self.clone()),
            Some((_, lc)) if lc.is_one() => Ok(self.clone()),
            Some((_, lc)) => Ok(self.scale_left(&lc.inv()?)),
        }
    }

    pub fn map_coeffs<D: Coeff, E>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> Result<D, E>) -> Result<Operator<D>, E> {
        let mut out = Operator::<D>::zero(ctx, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Degree of `c D^a` is `deg c + 2|a|`.
    pub fn homogeneity(&self, grading: &Grading) -> Homogeneity {
        let mut acc = Homogeneity::Zero;
        for (m, c) in &self.terms {
            let h = match c.homogeneity(grading) {
                Homogeneity::Zero => continue,
                Homogeneity::Degree(d) => Homogeneity::Degree(d + Grading::H_DEGREE * m.degree() as i64),
                Homogeneity::Inhomogeneous => return Homogeneity::Inhomogeneous,
            };
            acc = match (acc, h) {
                (Homogeneity::Zero, x) => x,
                (Homogeneity::Degree(a), Homogeneity::Degree(b)) if a == b => acc,
                _ => return Homogeneity::Inhomogeneous,
            };
        }
        acc
    }

    /// Operator form: coefficients times `∂` monomials (`c D^a = c h^{|a|} ∂^a`).
    pub fn fmt_operator(&self) -> String {
        format_terms(self.terms.iter().rev().map(|(m, c)| {
            let k = m.degree() as i32;
            let c = if k > 0 { c.mul(&C::h_pow(&self.ctx, k)) } else { c.clone() };
            (c.plain(), m.fmt_named("d"))
        }))
    }

    /// Commutative form in the symbols `b_i`.
    pub fn fmt_symbol(&self) -> String {
        format_terms(self.terms.iter().rev().map(|(m, c)| (c.plain(), m.fmt_named("b"))))
    }
}

/// True if `s` has a `+` or binary `-` outside parentheses.
fn has_top_level_sum(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 => return true,
            _ => {}
        }
    }
    false
}

/// Joins `(coefficient, monomial)` strings as a signed sum.
fn format_terms(terms: impl Iterator<Item = (String, String)>) -> String {
    let mut out = String::new();
    for (c, m) in terms {
        let compound = has_top_level_sum(&c) || c.contains("O(");
        let bare = !compound || m.is_empty();
        let (neg, body) = if bare && c.starts_with('-') { (true, c[1..].to_string()) } else { (false, c) };
        let body = if compound && !m.is_empty() { format!("({body})") } else { body };
        let term = match (body.as_str(), m.is_empty()) {
            (b, true) => b.to_string(),
            ("1", false) => m,
            (b, false) => format!("{b}*{m}"),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl Operator<RatFunc> {
    /// Scalar multiple with polynomial coefficients of coprime integer content
    /// and a positive leading coefficient.
    pub fn clear_denominators(&self) -> Self {
        let nq = *self.ctx();
        let mut den = Poly::one(nq + 1);
        for c in self.terms.values() {
            let d = c.denominator();
            let g = den.gcd(d);
            den = den.mul(&d.div_exact(&g).expect("gcd divides"));
        }
        let scaled = self.scale_left(&RatFunc::from_poly(nq, den));
        let mut num = BigInt::zero();
        let mut dens = BigInt::one();
        for c in scaled.terms.values() {
            let r = c.numerator().rational_content();
            num = num.gcd(r.numer());
            dens = dens.lcm(r.denom());
        }
        let mut content = BigRational::new(num, dens);
        let lead_negative = scaled
            .leading()
            .and_then(|(_, c)| c.numerator().leading().map(|(_, lc)| lc.is_negative()))
            .unwrap_or(false);
        if lead_negative {
            content = -content;
        }
        if content.is_zero() {
            return scaled;
        }
        scaled.scale_rational(&content.recip())
    }
}

impl<C: Coeff> fmt::Display for Operator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_operator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RatFunc;

    fn d(i: usize) -> Operator<RatFunc> {
        Operator::d(&2, 2, i)
    }
    fn c(x: RatFunc) -> Operator<RatFunc> {
        Operator::from_coeff(x, 2)
    }

    #[test]
    fn grevlex_orders_d1_above_d2() {
        let mut monos = vec![DMono(vec![0, 2]), DMono(vec![1, 0]), DMono(vec![0, 0]), DMono(vec![0, 1]), DMono(vec![1, 1])];
        monos.sort();
        assert_eq!(
            monos,
            vec![DMono(vec![0, 0]), DMono(vec![0, 1]), DMono(vec![1, 0]), DMono(vec![0, 2]), DMono(vec![1, 1])]
        );
    }

    #[test]
    fn leibniz_rule() {
        // D1 q1 = q1 D1 + h q1 ; D1 q2 = q2 D1
        let q1 = RatFunc::q_var(&2, 0);
        let q2 = RatFunc::q_var(&2, 1);
        let h = RatFunc::h_pow(&2, 1);
        assert_eq!(d(0).mul(&c(q1.clone()), Mode::Ore), c(q1.clone()).mul(&d(0), Mode::Ore).add(&c(h.mul(&q1))));
        assert_eq!(d(0).mul(&c(q2.clone()), Mode::Ore), c(q2).mul(&d(0), Mode::Ore));
        assert_eq!(d(0).mul(&c(q1.clone()), Mode::Commutative), c(q1).mul(&d(0), Mode::Commutative));
    }

    #[test]
    fn second_power_of_leibniz() {
        // D^2 q = q D^2 + 2 h q D + h^2 q
        let q1 = RatFunc::q_var(&1, 0);
        let h = RatFunc::h_pow(&1, 1);
        let dd = Operator::<RatFunc>::d(&1, 1, 0);
        let lhs = dd.pow(2, Mode::Ore).mul(&Operator::from_coeff(q1.clone(), 1), Mode::Ore);
        let mut rhs = Operator::monomial(q1.clone(), DMono(vec![2]));
        rhs.add_term(DMono(vec![1]), q1.mul(&h).scale(&BigRational::from_integer(2.into())));
        rhs.add_term(DMono(vec![0]), q1.mul(&h).mul(&h));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_in_operator_form() {
        let q1 = RatFunc::q_var(&1, 0);
        let dd = Operator::<RatFunc>::d(&1, 1, 0);
        let p = dd.pow(2, Mode::Ore).sub(&Operator::from_coeff(q1, 1));
        assert_eq!(p.to_string(), "h^2*d1^2 - q1");
        assert_eq!(p.fmt_symbol(), "b1^2 - q1");
    }
}
