//! Semiclassical limit `h ∂_i -> b_i`, `h -> 0`, and the quantization check.

use super::{buchberger, GroebnerBasis, GroebnerError, Mode, Operator};
use crate::coeff::{Coeff, ScalarError};

/// Symbol of an operator: each `D_i` becomes `b_i`, then `h -> 0`.
pub fn symbol<C: Coeff>(op: &Operator<C>) -> Result<Operator<C>, ScalarError> {
    op.map_coeffs(op.ctx(), |c| c.at_h_zero())
}

pub fn symbols<C: Coeff>(ops: &[Operator<C>]) -> Result<Vec<Operator<C>>, ScalarError> {
    ops.iter().map(symbol).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationReport<C: Coeff> {
    /// `None` when the staircase is infinite.
    pub quantized_rank: Option<usize>,
    /// Rank of the classical algebra over the coefficient field.
    pub classical_rank: Option<usize>,
    /// Dimension of the classical algebra at `q = 0`.
    pub limit_rank: Option<usize>,
    pub symbols: Vec<Operator<C>>,
    /// Per generator: symbol minus classical relation lies in the classical ideal.
    pub symbol_matches: Vec<bool>,
    /// The symbols generate exactly the classical ideal.
    pub ideals_equal: bool,
    pub valid: bool,
    pub failures: Vec<String>,
}

fn fmt_rank(r: Option<usize>) -> String {
    r.map_or_else(|| "infinite".to_string(), |r| r.to_string())
}

/// Checks that `quantized` presents a module free of the classical rank whose
/// symbols recover the classical relations. Without explicit classical
/// relations the symbols of the generators are used.
pub fn check_quantization<C: Coeff>(
    quantized: &GroebnerBasis<C>,
    generators: &[Operator<C>],
    classical: Option<&[Operator<C>]>,
    step_cap: usize,
) -> Result<QuantizationReport<C>, GroebnerError> {
    let ctx = quantized.ctx();
    let r = quantized.nvars();
    let syms = symbols(generators)?;
    let relations: Vec<Operator<C>> = classical.map_or_else(|| syms.clone(), |c| c.to_vec());

    let classical_gb = buchberger(ctx, r, &relations, Mode::Commutative, step_cap)?;
    let at_zero = relations
        .iter()
        .map(|p| p.map_coeffs(ctx, |c| c.at_q_zero()))
        .collect::<Result<Vec<_>, _>>()?;
    let limit_gb = buchberger(ctx, r, &at_zero, Mode::Commutative, step_cap)?;
    let symbol_gb = buchberger(ctx, r, &syms, Mode::Commutative, step_cap)?;

    let quantized_rank = quantized.staircase().rank();
    let classical_rank = classical_gb.staircase().rank();
    let limit_rank = limit_gb.staircase().rank();

    let mut symbol_matches = Vec::new();
    for (s, rel) in syms.iter().zip(&relations) {
        symbol_matches.push(classical_gb.normal_form(&s.sub(rel))?.is_zero());
    }
    let ideals_equal = symbol_gb.elements() == classical_gb.elements();

    let mut failures = Vec::new();
    if generators.len() != relations.len() {
        failures.push(format!(
            "{} generators but {} classical relations",
            generators.len(),
            relations.len()
        ));
    }
    match (quantized_rank, classical_rank, limit_rank) {
        (Some(a), Some(b), Some(c)) if a == b && b == c => {}
        _ => failures.push(format!(
            "rank mismatch: quantized {}, classical {}, classical at q = 0 {}",
            fmt_rank(quantized_rank),
            fmt_rank(classical_rank),
            fmt_rank(limit_rank)
        )),
    }
    for (i, ok) in symbol_matches.iter().enumerate() {
        if !ok {
            failures.push(format!("symbol of generator {} is not its classical relation", i + 1));
        }
    }
    if !ideals_equal {
        failures.push("symbols do not generate the classical ideal".to_string());
    }
    Ok(QuantizationReport {
        quantized_rank,
        classical_rank,
        limit_rank,
        symbols: syms,
        symbol_matches,
        ideals_equal,
        valid: failures.is_empty(),
        failures,
    })
}
