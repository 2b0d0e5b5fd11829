//! Coordinate change read off the central block of `Q₀`.
//!
//! When `Q₀` mixes the degree-one basis elements `h∂_1..h∂_r` among
//! themselves, that block `T` is the Jacobian `T_{kj} = ∂_j t̂_k` of new
//! coordinates `t̂`. Integrating it gives `q̂_k = q_k exp(g_k(q))`; the
//! defining operators are then rewritten in `q̂` and `∂̂`.

use num_rational::BigRational;
use thiserror::Error;

use crate::coeff::{Coeff, Grading, RatFunc, ScalarError, Series, SeriesCtx};
use crate::matrix::Matrix;
use crate::ore::{DMono, GroebnerBasis, Mode, Operator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MirrorError {
    #[error("block pattern violated: {0}")]
    BlockPatternViolation(String),
    #[error("coordinate change hypothesis not met: {0}")]
    HypothesisFailed(String),
    #[error("Jacobian block is not integrable at q^{monomial:?} (coordinate {coordinate})")]
    NonIntegrable { monomial: Vec<u32>, coordinate: usize },
    #[error("Jacobian block is not the identity at q = 0")]
    NotIdentityAtOrigin,
    #[error("transformed vector fields do not commute")]
    NonCommuting,
    #[error("coordinate series do not compose to the identity")]
    CompositionFailed,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Checks the preconditions for reading a coordinate change off `Q₀`: all
/// `|q_i| >= 0`, no positive `h`-powers in the connection, and `h`-free
/// zeroth-order terms in the second-order Gröbner basis elements.
pub fn check_hypotheses<C: Coeff>(grading: &Grading, p: usize, gb: &GroebnerBasis<C>) -> Result<(), MirrorError> {
    if !grading.all_at_least(0) {
        return Err(MirrorError::HypothesisFailed("some |q_i| is negative".into()));
    }
    if p != 0 {
        return Err(MirrorError::HypothesisFailed(format!("connection has h-powers up to h^{p}")));
    }
    let one = DMono::one(gb.nvars());
    for g in gb.elements() {
        if g.order() == Some(2) && !g.coeff(&one).is_h_free() {
            return Err(MirrorError::HypothesisFailed(format!(
                "zeroth-order term of {g} depends on h"
            )));
        }
    }
    Ok(())
}

/// The `r x r` block of `Q₀` on `h∂_1..h∂_r`, after checking that the
/// columns of blocks 0 and 1 are supported on their diagonal blocks.
pub fn extract_jacobian_block<C: Coeff>(q0: &Matrix<C>, basis: &[DMono]) -> Result<Matrix<C>, MirrorError> {
    let r = basis.first().map_or(0, |m| m.0.len());
    let blocks: Vec<u32> = basis.iter().map(DMono::degree).collect();
    for (i, j, c) in q0.entries() {
        if blocks[j] <= 1 && blocks[i] != blocks[j] && !c.is_zero() {
            return Err(MirrorError::BlockPatternViolation(format!("entry ({i}, {j}) = {c}")));
        }
    }
    if !q0.get(0, 0).is_one() {
        return Err(MirrorError::BlockPatternViolation(format!("entry (0, 0) = {}", q0.get(0, 0))));
    }
    let pos: Vec<usize> = (0..r)
        .map(|k| {
            basis
                .iter()
                .position(|m| *m == DMono::var(r, k))
                .ok_or_else(|| MirrorError::BlockPatternViolation(format!("h∂_{} is not a basis element", k + 1)))
        })
        .collect::<Result<_, _>>()?;
    Ok(Matrix::from_fn(q0.ctx(), r, r, |k, j| q0.get(pos[k], pos[j]).clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    pub jacobian: Matrix<Series>,
    /// `t̂_k = t_k + g_k(q)`.
    pub shifts: Vec<Series>,
    /// `q̂_k` as series in `q`.
    pub forward: Vec<Series>,
    /// `q_k` as series in `q̂`.
    pub inverse: Vec<Series>,
}

impl CoordinateChange {
    pub fn is_identity(&self) -> bool {
        self.shifts.iter().all(Coeff::is_zero)
    }

    pub fn ctx(&self) -> &SeriesCtx {
        self.jacobian.ctx()
    }
}

/// Solves `∂_j g_k = T_{kj} − δ_{kj}`, `g_k(0) = 0`, then builds the
/// forward and inverse coordinate series and checks they compose to the
/// identity.
pub fn integrate_coordinates(t: &Matrix<Series>) -> Result<CoordinateChange, MirrorError> {
    let ctx = t.ctx().clone();
    let r = t.rows();
    let zero = vec![0u32; r];
    for k in 0..r {
        for j in 0..r {
            let c0 = t.get(k, j).at_q_zero()?;
            let expected = if k == j { Series::one(&ctx) } else { Series::zero(&ctx) };
            if c0 != expected {
                return Err(MirrorError::NotIdentityAtOrigin);
            }
        }
    }
    let mut shifts = Vec::with_capacity(r);
    for k in 0..r {
        let mut terms = Vec::new();
        for m in ctx.monomials().into_iter().filter(|m| *m != zero) {
            let pivot = m.iter().position(|&e| e > 0).expect("nonzero");
            let value = t.get(k, pivot).coeff(&m, 0) / BigRational::from_integer(m[pivot].into());
            for j in 0..r {
                let lhs = &value * BigRational::from_integer(m[j].into());
                if lhs != t.get(k, j).coeff(&m, 0) {
                    return Err(MirrorError::NonIntegrable { monomial: m, coordinate: k });
                }
            }
            terms.push((m, 0, value));
        }
        shifts.push(Series::from_terms(&ctx, terms));
    }
    let forward: Vec<Series> =
        (0..r).map(|k| Ok(Series::q_var(&ctx, k).mul(&shifts[k].exp()?))).collect::<Result<_, ScalarError>>()?;
    // q = q̂ exp(−g(q)), iterated to a fixed point
    let hat: Vec<Series> = (0..r).map(|k| Series::q_var(&ctx, k)).collect();
    let mut inverse = hat.clone();
    for _ in 0..=ctx.order() {
        let next: Vec<Series> = (0..r)
            .map(|k| Ok(hat[k].mul(&shifts[k].substitute(&inverse)?.neg().exp()?)))
            .collect::<Result<_, ScalarError>>()?;
        let done = next.iter().zip(&inverse).all(|(a, b)| a.identical(b));
        inverse = next;
        if done {
            break;
        }
    }
    for k in 0..r {
        if forward[k].substitute(&inverse)? != hat[k] || inverse[k].substitute(&forward)? != hat[k] {
            return Err(MirrorError::CompositionFailed);
        }
    }
    let cc = CoordinateChange { jacobian: t.clone(), shifts, forward, inverse };
    if !hatted_fields_commute(&cc.jacobian)? {
        return Err(MirrorError::NonCommuting);
    }
    Ok(cc)
}

/// `[∂̂_i, ∂̂_j] = 0` for `∂̂_i = Σ_j (T⁻¹)_{ji} ∂_j`.
pub fn hatted_fields_commute(t: &Matrix<Series>) -> Result<bool, MirrorError> {
    let a = t.inverse()?;
    let r = a.rows();
    for i in 0..r {
        for k in i + 1..r {
            for j in 0..r {
                let mut acc = Series::zero(a.ctx());
                for l in 0..r {
                    acc = acc.add(&a.get(l, i).mul(&a.get(j, k).euler(l)));
                    acc = acc.sub(&a.get(l, k).mul(&a.get(j, i).euler(l)));
                }
                if !acc.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Rewrites operators in the hatted coordinates: coefficients are composed
/// with `q(q̂)` and `h∂_i` becomes `Σ_k T_{ki}(q(q̂)) h∂̂_k`.
pub fn transform_operators(gens: &[Operator<RatFunc>], cc: &CoordinateChange) -> Result<Vec<Operator<Series>>, MirrorError> {
    let ctx = cc.ctx().clone();
    let r = cc.jacobian.rows();
    let t_hat = cc.jacobian.try_map(&ctx, |c| c.substitute(&cc.inverse))?;
    let e: Vec<Operator<Series>> = (0..r)
        .map(|i| {
            Operator::from_terms(&ctx, r, (0..r).map(|k| (DMono::var(r, k), t_hat.get(k, i).clone())))
        })
        .collect();
    gens.iter()
        .map(|g| {
            let mut out = Operator::zero(&ctx, r);
            for (m, c) in g.terms() {
                let c = c.to_series(&ctx)?.substitute(&cc.inverse)?;
                let mut term = Operator::from_coeff(c, r);
                for (i, &a) in m.exps().iter().enumerate() {
                    term = term.mul(&e[i].pow(a, Mode::Ore), Mode::Ore);
                }
                out = out.add(&term);
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_jacobian_gives_identity_change() {
        let ctx = SeriesCtx::new(vec![1, 4], 6);
        let cc = integrate_coordinates(&Matrix::identity(&ctx, 2)).unwrap();
        assert!(cc.is_identity());
        assert_eq!(cc.forward[1], Series::q_var(&ctx, 1));
    }

    #[test]
    fn pattern_violation_is_reported() {
        let ctx = SeriesCtx::new(vec![1], 4);
        let basis = vec![DMono(vec![0]), DMono(vec![1])];
        let mut q0 = Matrix::identity(&ctx, 2);
        q0.set(0, 1, Series::q_var(&ctx, 0));
        assert!(matches!(extract_jacobian_block(&q0, &basis), Err(MirrorError::BlockPatternViolation(_))));
    }
}
