//! Buchberger completion for left ideals, in either product mode.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{DMono, Mode, Operator};
use crate::coeff::{Coeff, ScalarError};
use crate::par::par_map;

pub const DEFAULT_STEP_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("leading coefficient {0} is not invertible")]
    NonUnitLeadingCoefficient(String),
    #[error("Buchberger step cap of {0} reduction steps exceeded")]
    ResourceLimit(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Shape of the standard-monomial staircase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Staircase {
    /// Standard monomials in increasing monomial order.
    Finite(Vec<DMono>),
    Infinite,
}

impl Staircase {
    pub fn rank(&self) -> Option<usize> {
        match self {
            Staircase::Finite(v) => Some(v.len()),
            Staircase::Infinite => None,
        }
    }

    pub fn monomials(&self) -> Option<&[DMono]> {
        match self {
            Staircase::Finite(v) => Some(v),
            Staircase::Infinite => None,
        }
    }
}

/// A reduced Gröbner basis: monic, inter-reduced, sorted by leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<C: Coeff> {
    mode: Mode,
    nvars: usize,
    ctx: C::Ctx,
    elements: Vec<Operator<C>>,
}

fn make_monic<C: Coeff>(p: &Operator<C>) -> Result<Operator<C>, GroebnerError> {
    p.monic().map_err(|e| match e {
        ScalarError::DivisionByZero | ScalarError::ZeroConstantTerm | ScalarError::NonUnitConstantTerm(_) => {
            GroebnerError::NonUnitLeadingCoefficient(p.leading().map(|(_, c)| c.to_string()).unwrap_or_default())
        }
        other => GroebnerError::Scalar(other),
    })
}

/// Full reduction of `p` by monic `basis`; returns the remainder and the
/// number of elimination steps used.
fn reduce<C: Coeff>(
    p: &Operator<C>,
    basis: &[Operator<C>],
    mode: Mode,
    budget: usize,
    cap: usize,
) -> Result<(Operator<C>, usize), GroebnerError> {
    let mut p = p.clone();
    let mut rem = Operator::zero(p.ctx(), p.nvars());
    let mut steps = 0usize;
    while let Some((m, c)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = basis.iter().find(|g| g.leading_monomial().is_some_and(|lm| lm.divides(&m)));
        match divisor {
            Some(g) => {
                let shift = g.leading_monomial().expect("nonzero").quotient(&m);
                let t = g.mul_monomial_left(&shift, mode).scale_left(&c);
                p = p.sub(&t);
                // guard against a leading term that fails to cancel (series truncation)
                if p.leading_monomial() == Some(&m) {
                    let lc = p.leading().map(|(_, c)| c.clone()).expect("nonzero");
                    return Err(GroebnerError::NonUnitLeadingCoefficient(lc.to_string()));
                }
                steps += 1;
                if steps > budget {
                    return Err(GroebnerError::ResourceLimit(cap));
                }
            }
            None => {
                let mut lead = Operator::zero(p.ctx(), p.nvars());
                lead.add_term(m.clone(), c.clone());
                rem.add_term(m, c);
                p = p.sub(&lead);
            }
        }
    }
    Ok((rem, steps))
}

fn s_polynomial<C: Coeff>(f: &Operator<C>, g: &Operator<C>, mode: Mode) -> Operator<C> {
    let lf = f.leading_monomial().expect("nonzero");
    let lg = g.leading_monomial().expect("nonzero");
    let l = lf.lcm(lg);
    f.mul_monomial_left(&lf.quotient(&l), mode).sub(&g.mul_monomial_left(&lg.quotient(&l), mode))
}

/// Completes `gens` to a reduced left Gröbner basis in grevlex order.
///
/// S-pairs of the lowest lcm degree are reduced as one batch (in parallel);
/// the reduced basis is unique, so the output does not depend on scheduling.
pub fn buchberger<C: Coeff>(
    ctx: &C::Ctx,
    nvars: usize,
    gens: &[Operator<C>],
    mode: Mode,
    step_cap: usize,
) -> Result<GroebnerBasis<C>, GroebnerError> {
    let mut basis: Vec<Operator<C>> = Vec::new();
    let mut pairs: BTreeSet<(u32, DMono, usize, usize)> = BTreeSet::new();
    let mut used = 0usize;

    let add = |basis: &mut Vec<Operator<C>>, pairs: &mut BTreeSet<(u32, DMono, usize, usize)>, p: Operator<C>| {
        let k = basis.len();
        let lp = p.leading_monomial().expect("nonzero").clone();
        for (i, g) in basis.iter().enumerate() {
            let lg = g.leading_monomial().expect("nonzero");
            if mode == Mode::Commutative && lg.is_coprime(&lp) {
                continue;
            }
            let l = lg.lcm(&lp);
            pairs.insert((l.degree(), l, i, k));
        }
        basis.push(p);
    };

    for g in gens {
        let (r, s) = reduce(g, &basis, mode, step_cap.saturating_sub(used), step_cap)?;
        used += s;
        if !r.is_zero() {
            add(&mut basis, &mut pairs, make_monic(&r)?);
        }
    }

    while let Some(first) = pairs.iter().next().cloned() {
        let batch: Vec<_> = pairs.iter().take_while(|p| p.0 == first.0).cloned().collect();
        for p in &batch {
            pairs.remove(p);
        }
        let budget = step_cap.saturating_sub(used);
        let snapshot = basis.clone();
        let reduced = par_map(&batch, |(_, _, i, j)| {
            let s = s_polynomial(&snapshot[*i], &snapshot[*j], mode);
            reduce(&s, &snapshot, mode, budget, step_cap)
        });
        let mut batch_steps = 0usize;
        let mut results = Vec::new();
        for r in reduced {
            let (r, s) = r?;
            batch_steps += s;
            results.push(r);
        }
        used += batch_steps;
        if used > step_cap {
            return Err(GroebnerError::ResourceLimit(step_cap));
        }
        for r in results {
            if r.is_zero() {
                continue;
            }
            // the basis may have grown within this batch
            let (r, s) = reduce(&r, &basis, mode, step_cap.saturating_sub(used), step_cap)?;
            used += s;
            if !r.is_zero() {
                add(&mut basis, &mut pairs, make_monic(&r)?);
            }
        }
    }

    let elements = interreduce(basis, mode, step_cap)?;
    Ok(GroebnerBasis { mode, nvars, ctx: ctx.clone(), elements })
}

fn interreduce<C: Coeff>(mut basis: Vec<Operator<C>>, mode: Mode, cap: usize) -> Result<Vec<Operator<C>>, GroebnerError> {
    basis.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    // drop elements whose leading monomial is divisible by an earlier kept one
    let mut minimal: Vec<Operator<C>> = Vec::new();
    for g in basis {
        let lg = g.leading_monomial().expect("nonzero").clone();
        if minimal.iter().any(|k| k.leading_monomial().expect("nonzero").divides(&lg)) {
            continue;
        }
        minimal.retain(|k| !lg.divides(k.leading_monomial().expect("nonzero")));
        minimal.push(g);
    }
    let snapshot = minimal.clone();
    let reduced = par_map(&(0..snapshot.len()).collect::<Vec<_>>(), |&i| {
        let g = &snapshot[i];
        let (lm, lc) = g.leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        let mut tail = g.clone();
        let mut lead = Operator::zero(g.ctx(), g.nvars());
        lead.add_term(lm, lc);
        tail = tail.sub(&lead);
        let others: Vec<Operator<C>> =
            snapshot.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, o)| o.clone()).collect();
        let (t, _) = reduce(&tail, &others, mode, cap, cap)?;
        make_monic(&lead.add(&t))
    });
    let mut out = reduced.into_iter().collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    Ok(out)
}

impl<C: Coeff> GroebnerBasis<C> {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn elements(&self) -> &[Operator<C>] {
        &self.elements
    }

    pub fn leading_monomials(&self) -> Vec<DMono> {
        self.elements.iter().filter_map(|g| g.leading_monomial().cloned()).collect()
    }

    pub fn normal_form(&self, p: &Operator<C>) -> Result<Operator<C>, GroebnerError> {
        Ok(reduce(p, &self.elements, self.mode, usize::MAX, usize::MAX)?.0)
    }

    /// True if the ideal contains a nonzero constant.
    pub fn is_trivial(&self) -> bool {
        self.leading_monomials().iter().any(|m| m.degree() == 0)
    }

    pub fn staircase(&self) -> Staircase {
        let lms = self.leading_monomials();
        let mut bounds = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            let b = lms
                .iter()
                .filter(|m| m.degree() == 0 || m.pure_power_of() == Some(i))
                .map(|m| m.0[i])
                .min();
            match b {
                Some(b) => bounds.push(b),
                None => return Staircase::Infinite,
            }
        }
        let mut out = vec![DMono(Vec::new())];
        for &b in &bounds {
            let mut next = Vec::new();
            for prefix in &out {
                for k in 0..b {
                    let mut v = prefix.0.clone();
                    v.push(k);
                    next.push(DMono(v));
                }
            }
            out = next;
        }
        out.retain(|m| !lms.iter().any(|l| l.divides(m)));
        out.sort();
        Staircase::Finite(out)
    }

    /// Verifies that every S-polynomial reduces to zero.
    pub fn verify(&self) -> Result<bool, GroebnerError> {
        for i in 0..self.elements.len() {
            for j in i + 1..self.elements.len() {
                let s = s_polynomial(&self.elements[i], &self.elements[j], self.mode);
                if !self.normal_form(&s)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Expresses the normal form of `p` in the given standard-monomial basis.
    pub fn coordinates(&self, p: &Operator<C>, basis: &[DMono]) -> Result<Vec<C>, GroebnerError> {
        let nf = self.normal_form(p)?;
        Ok(basis.iter().map(|m| nf.coeff(m)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RatFunc;

    #[test]
    fn cp1_is_its_own_basis() {
        let d = Operator::<RatFunc>::d(&1, 1, 0);
        let p = d.pow(2, Mode::Ore).sub(&Operator::from_coeff(RatFunc::q_var(&1, 0), 1));
        let gb = buchberger(&1, 1, std::slice::from_ref(&p), Mode::Ore, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(gb.elements(), std::slice::from_ref(&p));
        assert_eq!(gb.staircase(), Staircase::Finite(vec![DMono(vec![0]), DMono(vec![1])]));
        // D^2 reduces to q
        let nf = gb.normal_form(&d.pow(2, Mode::Ore)).unwrap();
        assert_eq!(nf, Operator::from_coeff(RatFunc::q_var(&1, 0), 1));
    }

    #[test]
    fn step_cap_is_enforced() {
        let ctx = 2;
        let b = |i| Operator::<RatFunc>::d(&ctx, 2, i);
        let gens = [b(0).pow(2, Mode::Commutative).sub(&b(1)), b(0).mul(&b(1), Mode::Commutative).sub(&b(0))];
        assert_eq!(
            buchberger(&ctx, 2, &gens, Mode::Commutative, 0).unwrap_err(),
            GroebnerError::ResourceLimit(0)
        );
        assert!(buchberger(&ctx, 2, &gens, Mode::Commutative, DEFAULT_STEP_CAP).unwrap().verify().unwrap());
    }
}
