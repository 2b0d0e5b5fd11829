//! Truncated graded power series in `q1..qr` with Laurent coefficients in `h`.
//!
//! A term `c q^m h^k` has truncation weight `sum_i m_i w_i`, where `w_i` is
//! the variable's truncation weight (`max(|q_i|, 1)`); `h` carries no
//! truncation weight. A series of order `N` stores exactly the terms of weight
//! `<= N`; everything heavier is unknown. Binary operations return the
//! smaller of the two orders.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Coeff, Grading, Homogeneity, ScalarError};

type Key = (Vec<u32>, i32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCtx {
    weights: Arc<[u32]>,
    order: u32,
}

impl SeriesCtx {
    pub fn new(weights: Vec<u32>, order: u32) -> Self {
        assert!(weights.iter().all(|&w| w >= 1), "truncation weights must be positive");
        SeriesCtx { weights: weights.into(), order }
    }

    pub fn for_grading(grading: &Grading, order: u32) -> Self {
        Self::new(grading.truncation_weights(), order)
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn with_order(&self, order: u32) -> Self {
        SeriesCtx { weights: self.weights.clone(), order }
    }

    pub fn weight(&self, exp: &[u32]) -> u32 {
        exp.iter().zip(self.weights.iter()).map(|(e, w)| e * w).sum()
    }

    /// All exponent vectors of weight `<= order`, sorted by total exponent
    /// sum and then lexicographically (a linear extension of divisibility).
    pub fn monomials(&self) -> Vec<Vec<u32>> {
        fn rec(ctx: &SeriesCtx, i: usize, cur: &mut Vec<u32>, used: u32, out: &mut Vec<Vec<u32>>) {
            if i == ctx.weights.len() {
                out.push(cur.clone());
                return;
            }
            let mut k = 0;
            while used + k * ctx.weights[i] <= ctx.order {
                cur.push(k);
                rec(ctx, i + 1, cur, used + k * ctx.weights[i], out);
                cur.pop();
                k += 1;
            }
        }
        let mut out = Vec::new();
        rec(self, 0, &mut Vec::new(), 0, &mut out);
        out.sort_by(|a, b| {
            let sa: u32 = a.iter().sum();
            let sb: u32 = b.iter().sum();
            sa.cmp(&sb).then_with(|| a.cmp(b))
        });
        out
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    ctx: SeriesCtx,
    terms: BTreeMap<Key, BigRational>,
}

impl Series {
    pub fn from_terms(ctx: &SeriesCtx, terms: impl IntoIterator<Item = (Vec<u32>, i32, BigRational)>) -> Self {
        let mut s = Series { ctx: ctx.clone(), terms: BTreeMap::new() };
        for (q, h, c) in terms {
            s.add_term(q, h, c);
        }
        s
    }

    pub fn monomial(ctx: &SeriesCtx, q: Vec<u32>, h: i32, c: BigRational) -> Self {
        Self::from_terms(ctx, [(q, h, c)])
    }

    pub fn series_ctx(&self) -> &SeriesCtx {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.ctx.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], i32, &BigRational)> {
        self.terms.iter().map(|((q, h), c)| (q.as_slice(), *h, c))
    }

    pub fn coeff(&self, q: &[u32], h: i32) -> BigRational {
        self.terms.get(&(q.to_vec(), h)).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, q: Vec<u32>, h: i32, c: BigRational) {
        if c.is_zero() || self.ctx.weight(&q) > self.ctx.order {
            return;
        }
        let key = (q, h);
        let slot = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check_ctx(&self, other: &Series) {
        assert_eq!(self.ctx.weights, other.ctx.weights, "series over different variable weights");
    }

    fn min_ctx(&self, other: &Series) -> SeriesCtx {
        self.check_ctx(other);
        self.ctx.with_order(self.ctx.order.min(other.ctx.order))
    }

    /// Drops everything above `order` (which must not exceed the current order).
    pub fn truncate(&self, order: u32) -> Series {
        let ctx = self.ctx.with_order(order.min(self.ctx.order));
        Series::from_terms(&ctx, self.terms.iter().map(|((q, h), c)| (q.clone(), *h, c.clone())))
    }

    /// The `q^0` part, as `(h exponent, coefficient)` pairs.
    fn constant_part(&self) -> Vec<(i32, BigRational)> {
        self.terms
            .iter()
            .filter(|((q, _), _)| q.iter().all(|&e| e == 0))
            .map(|((_, h), c)| (*h, c.clone()))
            .collect()
    }

    fn without_constant(&self) -> Series {
        Series {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|((q, _), _)| q.iter().any(|&e| e > 0))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_polynomial_in_h(&self) -> bool {
        self.terms.keys().all(|(_, h)| *h >= 0)
    }

    /// Geometric-series inverse. The `q^0` part must be a single term `c h^k`.
    pub fn inverse(&self) -> Result<Series, ScalarError> {
        let c0 = self.constant_part();
        if c0.is_empty() {
            return Err(ScalarError::ZeroConstantTerm);
        }
        if c0.len() > 1 {
            return Err(ScalarError::NonUnitConstantTerm(self.to_string()));
        }
        let (k, c) = c0[0].clone();
        let lead_inv = Series::monomial(&self.ctx, vec![0; self.ctx.num_vars()], -k, c.recip());
        // self = lead * (1 + u), u without constant term
        let u = self.mul(&lead_inv).without_constant();
        let mut acc = Series::one(&self.ctx);
        let mut power = Series::one(&self.ctx);
        let neg_u = u.neg();
        for _ in 0..self.ctx.order {
            power = power.mul(&neg_u);
            if power.terms.is_empty() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.mul(&lead_inv))
    }

    /// Square root with constant term 1, via the binomial series.
    pub fn sqrt(&self) -> Result<Series, ScalarError> {
        let c0 = self.constant_part();
        if c0.len() != 1 || c0[0].0 != 0 || !c0[0].1.is_one() {
            return Err(ScalarError::NonUnitRadicand(self.to_string()));
        }
        let u = self.without_constant();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut acc = Series::one(&self.ctx);
        let mut power = Series::one(&self.ctx);
        let mut binom = BigRational::one();
        for n in 0..self.ctx.order {
            // C(1/2, n+1) = C(1/2, n) * (1/2 - n) / (n + 1)
            binom = binom * (&half - BigRational::from_integer(n.into())) / BigRational::from_integer((n + 1).into());
            power = power.mul(&u);
            if power.terms.is_empty() {
                break;
            }
            acc = acc.add(&power.scale(&binom));
        }
        Ok(acc)
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Result<Series, ScalarError> {
        if !self.constant_part().is_empty() {
            return Err(ScalarError::NonvanishingConstant(0));
        }
        let mut acc = Series::one(&self.ctx);
        let mut power = Series::one(&self.ctx);
        for n in 1..=self.ctx.order {
            power = power.mul(self).scale(&BigRational::new(BigInt::one(), BigInt::from(n)));
            if power.terms.is_empty() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc)
    }

    /// Composition `self(images)`: variable `q_i` is replaced by `images[i]`.
    ///
    /// Each image must vanish at the origin and have weight at least that of
    /// the variable it replaces, so no precision is lost.
    pub fn substitute(&self, images: &[Series]) -> Result<Series, ScalarError> {
        assert_eq!(images.len(), self.ctx.num_vars());
        let target = images.first().map(|g| g.ctx.clone()).unwrap_or_else(|| self.ctx.clone());
        let mut order = self.ctx.order;
        for (i, g) in images.iter().enumerate() {
            if !g.constant_part().is_empty() {
                return Err(ScalarError::NonvanishingConstant(i));
            }
            let min_w = g.terms.keys().map(|(q, _)| g.ctx.weight(q)).min().unwrap_or(u32::MAX);
            if min_w < self.ctx.weights[i] {
                return Err(ScalarError::PrecisionLoss(i));
            }
            g.check_ctx(&images[0]);
            order = order.min(g.ctx.order);
        }
        let ctx = target.with_order(order);
        let mut powers: Vec<Vec<Series>> = Vec::with_capacity(images.len());
        for (i, g) in images.iter().enumerate() {
            let max_e = self.terms.keys().map(|(q, _)| q[i]).max().unwrap_or(0);
            let g = g.truncate(order);
            let mut pw = vec![Series::one(&ctx)];
            for _ in 0..max_e {
                let next = pw.last().expect("nonempty").mul(&g);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut out = Series::zero(&ctx);
        for ((q, h), c) in &self.terms {
            let mut t = Series::monomial(&ctx, vec![0; ctx.num_vars()], *h, c.clone());
            for (i, &e) in q.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Exact equality of the stored terms and order.
    pub fn identical(&self, other: &Series) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, q: &[u32], h: i32, c: &BigRational, first: bool) -> fmt::Result {
        let neg = c.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let abs = c.abs();
        let mut factors = Vec::new();
        for (i, &e) in q.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(format!("q{}", i + 1)),
                _ => factors.push(format!("q{}^{}", i + 1, e)),
            }
        }
        match h {
            0 => {}
            1 => factors.push("h".to_string()),
            _ => factors.push(format!("h^{h}")),
        }
        if factors.is_empty() {
            write!(f, "{abs}")
        } else if abs.is_one() {
            write!(f, "{}", factors.join("*"))
        } else {
            write!(f, "{}*{}", abs, factors.join("*"))
        }
    }
}

impl PartialEq for Series {
    /// Agreement on every term of weight up to the smaller order.
    fn eq(&self, other: &Series) -> bool {
        if self.ctx.weights != other.ctx.weights {
            return false;
        }
        let order = self.ctx.order.min(other.ctx.order);
        let a = self.terms.iter().filter(|((q, _), _)| self.ctx.weight(q) <= order);
        let b = other.terms.iter().filter(|((q, _), _)| other.ctx.weight(q) <= order);
        a.eq(b)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|((qa, ha), _), ((qb, hb), _)| {
            self.ctx.weight(qa).cmp(&self.ctx.weight(qb)).then_with(|| qb.cmp(qa)).then_with(|| ha.cmp(hb))
        });
        for (idx, ((q, h), c)) in terms.into_iter().enumerate() {
            Self::fmt_term(f, q, *h, c, idx == 0)?;
        }
        if f.alternate() {
            if self.terms.is_empty() {
                write!(f, "0")?;
            }
            Ok(())
        } else if self.terms.is_empty() {
            write!(f, "O(q^{})", self.ctx.order + 1)
        } else {
            write!(f, " + O(q^{})", self.ctx.order + 1)
        }
    }
}

impl Coeff for Series {
    type Ctx = SeriesCtx;

    fn ctx(&self) -> SeriesCtx {
        self.ctx.clone()
    }

    fn num_q(ctx: &SeriesCtx) -> usize {
        ctx.num_vars()
    }

    fn zero(ctx: &SeriesCtx) -> Self {
        Series { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    fn from_rational(ctx: &SeriesCtx, r: BigRational) -> Self {
        Series::monomial(ctx, vec![0; ctx.num_vars()], 0, r)
    }

    fn q_var(ctx: &SeriesCtx, i: usize) -> Self {
        let mut e = vec![0; ctx.num_vars()];
        e[i] = 1;
        Series::monomial(ctx, e, 0, BigRational::one())
    }

    fn h_pow(ctx: &SeriesCtx, k: i32) -> Self {
        Series::monomial(ctx, vec![0; ctx.num_vars()], k, BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let ctx = self.min_ctx(other);
        let mut out = self.truncate(ctx.order);
        for ((q, h), c) in &other.terms {
            out.add_term(q.clone(), *h, c.clone());
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let ctx = self.min_ctx(other);
        let mut acc: BTreeMap<Key, BigRational> = BTreeMap::new();
        let mut a: Vec<_> = self.terms.iter().map(|(k, c)| (ctx.weight(&k.0), k, c)).collect();
        let mut b: Vec<_> = other.terms.iter().map(|(k, c)| (ctx.weight(&k.0), k, c)).collect();
        a.sort_by_key(|t| t.0);
        b.sort_by_key(|t| t.0);
        for (wa, (qa, ha), ca) in &a {
            for (wb, (qb, hb), cb) in &b {
                if wa + wb > ctx.order {
                    break;
                }
                let q: Vec<u32> = qa.iter().zip(qb).map(|(x, y)| x + y).collect();
                *acc.entry((q, ha + hb)).or_insert_with(BigRational::zero) += *ca * *cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Series { ctx, terms: acc }
    }

    fn neg(&self) -> Self {
        Series { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }

    fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Series::zero(&self.ctx);
        }
        Series { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(k, c)| (k.clone(), c * r)).collect() }
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        self.inverse()
    }

    fn euler(&self, i: usize) -> Self {
        Series {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|((q, _), _)| q[i] > 0)
                .map(|(k, c)| (k.clone(), c * BigRational::from_integer(BigInt::from(k.0[i]))))
                .collect(),
        }
    }

    fn h_coefficients(&self) -> Result<BTreeMap<i32, Self>, ScalarError> {
        let mut out: BTreeMap<i32, Series> = BTreeMap::new();
        for ((q, h), c) in &self.terms {
            out.entry(*h).or_insert_with(|| Series::zero(&self.ctx)).add_term(q.clone(), 0, c.clone());
        }
        Ok(out)
    }

    fn at_h_zero(&self) -> Result<Self, ScalarError> {
        if self.terms.keys().any(|(_, h)| *h < 0) {
            return Err(ScalarError::PoleAtHZero(self.to_string()));
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|((_, h), _)| *h == 0).map(|(k, c)| (k.clone(), c.clone())).collect(),
        })
    }

    fn at_q_zero(&self) -> Result<Self, ScalarError> {
        Ok(Series::from_terms(
            &self.ctx,
            self.constant_part().into_iter().map(|(h, c)| (vec![0; self.ctx.num_vars()], h, c)),
        ))
    }

    fn is_h_free(&self) -> bool {
        self.terms.keys().all(|(_, h)| *h == 0)
    }

    fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let ((q, h), c) = self.terms.iter().next().expect("one term");
                (q.iter().all(|&e| e == 0) && *h == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn homogeneity(&self, grading: &Grading) -> Homogeneity {
        Homogeneity::from_degrees(self.terms.keys().map(|(q, h)| grading.degree_of(q, *h as i64)))
    }

    fn to_series(&self, ctx: &SeriesCtx) -> Result<Series, ScalarError> {
        if ctx.weights != self.ctx.weights {
            return Err(ScalarError::ContextMismatch);
        }
        Ok(self.truncate(ctx.order))
    }

    fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|((q, h), c)| {
                let mut exps: Vec<serde_json::Value> = q.iter().map(|&e| e.into()).collect();
                exps.push((*h).into());
                serde_json::json!([exps, c.to_string()])
            })
            .collect();
        serde_json::json!({ "order": self.ctx.order, "terms": terms })
    }

    fn plain(&self) -> String {
        format!("{self:#}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx1() -> SeriesCtx {
        SeriesCtx::new(vec![1], 8)
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn inverse_of_one_plus_q() {
        let ctx = ctx1();
        let f = Series::one(&ctx).add(&Series::q_var(&ctx, 0));
        let g = f.inverse().unwrap();
        for k in 0..=8u32 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(g.coeff(&[k], 0), r(sign));
        }
        assert!(f.mul(&g).is_one());
    }

    #[test]
    fn inverse_errors() {
        let ctx = ctx1();
        assert_eq!(Series::q_var(&ctx, 0).inverse().unwrap_err(), ScalarError::ZeroConstantTerm);
        let f = Series::one(&ctx).add(&Series::h_pow(&ctx, 1));
        assert!(matches!(f.inverse(), Err(ScalarError::NonUnitConstantTerm(_))));
        assert!(Series::one(&ctx).inverse().unwrap().is_one());
    }

    #[test]
    fn laurent_constant_term_inverts() {
        let ctx = ctx1();
        let f = Series::h_pow(&ctx, 2).scale(&r(-3)).add(&Series::q_var(&ctx, 0));
        assert!(f.mul(&f.inverse().unwrap()).is_one());
    }

    #[test]
    fn sqrt_of_one_minus_four_q() {
        let ctx = ctx1();
        let f = Series::one(&ctx).sub(&Series::q_var(&ctx, 0).scale(&r(4)));
        let s = f.sqrt().unwrap();
        // binomial coefficients of sqrt(1-4q), frozen from an independent expansion
        let expected = [1, -2, -2, -4, -10, -28, -84, -264, -858];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(s.coeff(&[k as u32], 0), r(*e));
        }
        assert_eq!(s.mul(&s), f);
        assert!(matches!(Series::q_var(&ctx, 0).sqrt(), Err(ScalarError::NonUnitRadicand(_))));
    }

    #[test]
    fn weights_bound_the_support() {
        let ctx = SeriesCtx::new(vec![1, 4], 8);
        let q2 = Series::q_var(&ctx, 1);
        assert!(!q2.mul(&q2).is_zero());
        assert!(q2.mul(&q2).mul(&Series::q_var(&ctx, 0)).is_zero());
        assert_eq!(ctx.monomials().len(), 9 + 5 + 1);
    }

    #[test]
    fn substitution_of_q2() {
        let ctx = SeriesCtx::new(vec![1, 4], 8);
        let one = Series::one(&ctx);
        let q1 = Series::q_var(&ctx, 0);
        let q2 = Series::q_var(&ctx, 1);
        let img = [q1.clone(), q2.mul(&one.add(&q1))];
        assert_eq!(q2.substitute(&img).unwrap(), q2.add(&q1.mul(&q2)));
        assert!(matches!(q2.substitute(&[one.clone(), q2.clone()]), Err(ScalarError::NonvanishingConstant(0))));
        assert!(matches!(q2.substitute(&[q1.clone(), q1.clone()]), Err(ScalarError::PrecisionLoss(1))));
    }

    #[test]
    fn display_is_ascending() {
        let ctx = ctx1();
        let f = Series::one(&ctx).sub(&Series::q_var(&ctx, 0).scale(&r(2)));
        assert_eq!(f.to_string(), "1 - 2*q1 + O(q^9)");
    }
}
