//! Quantum products from the Dubrovin-form connection.
//!
//! The hatted basis is `ĉ_i = Σ_j (Q₀⁻¹)_{ji} c_j` with `c_j = b^{a_j}` the
//! standard monomials. `ω̂_i` is multiplication by `b_i` on that basis; the
//! table is computed from powers of `ω̂` and, independently, by reducing
//! `ĉ_i ĉ_j` in the commutative algebra `𝒜̂`. Both must agree.

use thiserror::Error;

use crate::coeff::{Coeff, Grading, ScalarError, Series};
use crate::matrix::Matrix;
use crate::ore::{buchberger, symbols, DMono, GroebnerBasis, GroebnerError, Mode, Operator, Staircase};
use crate::par::par_range;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductsError {
    #[error("the symbol of an operator has a pole at h = 0")]
    PoleAtHZero,
    #[error("the hatted basis does not reduce to the classical basis at q = 0")]
    SingularBasis,
    #[error("standard monomials of the commutative algebra differ from the module basis")]
    StaircaseMismatch,
    #[error("basis element {index} is {found}, expected {expected}")]
    BasisShape { index: usize, found: String, expected: String },
    #[error("product ({i}, {j}) differs between matrix and reduction evaluation")]
    InconsistentTable { i: usize, j: usize },
    #[error("product ({i}, {j}) at q = 0 differs from the classical product")]
    ClassicalMismatch { i: usize, j: usize },
    #[error("coefficient of basis element {k} in product ({i}, {j}) has the wrong degree")]
    DegreeDefect { i: usize, j: usize, k: usize },
    #[error("ω̂_{i} and ω̂_{j} do not commute")]
    NonCommuting { i: usize, j: usize },
    #[error("product table is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("basis element 0 does not act as the identity")]
    IdentityFails,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `lim_{h->0}` of the symbols, i.e. the commutative relations of `𝒜̂`.
pub fn dequantize_relations<C: Coeff>(ops: &[Operator<C>]) -> Result<Vec<Operator<C>>, ProductsError> {
    symbols(ops).map_err(|e| match e {
        ScalarError::PoleAtHZero(_) => ProductsError::PoleAtHZero,
        other => ProductsError::Scalar(other),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisMap<C: Coeff> {
    /// Standard monomials `a_j`; `c_j = b^{a_j}`.
    pub classical: Vec<DMono>,
    /// `ĉ_i` as commutative polynomials in `b`.
    pub hatted: Vec<Operator<C>>,
    pub q0: Matrix<C>,
    pub q0_inv: Matrix<C>,
}

impl<C: Coeff> BasisMap<C> {
    pub fn rank(&self) -> usize {
        self.classical.len()
    }

    /// `δ(ĉ_i) = [[c_i]]` as a polynomial in `b`.
    pub fn delta(&self, i: usize) -> Operator<C> {
        Operator::monomial(C::one(self.q0.ctx()), self.classical[i].clone())
    }
}

/// Builds `ĉ_i` from `Q₀`. When all `|q_i| >= 4` the low blocks must be
/// untouched: `ĉ_0 = 1` and `ĉ_i = b_i`.
pub fn hatted_basis<C: Coeff>(q0: &Matrix<C>, classical: &[DMono], grading: &Grading) -> Result<BasisMap<C>, ProductsError> {
    let ctx = q0.ctx().clone();
    if !q0.at_q_zero()?.is_identity() {
        return Err(ProductsError::SingularBasis);
    }
    let q0_inv = q0.inverse()?;
    let n = classical.len();
    let hatted: Vec<Operator<C>> = (0..n)
        .map(|i| Operator::from_terms(&ctx, grading.num_vars(), (0..n).map(|j| (classical[j].clone(), q0_inv.get(j, i).clone()))))
        .collect();
    if grading.all_at_least(4) {
        for (i, c) in hatted.iter().enumerate() {
            if classical[i].degree() <= 1 {
                let expected = Operator::monomial(C::one(&ctx), classical[i].clone());
                if *c != expected {
                    return Err(ProductsError::BasisShape {
                        index: i,
                        found: c.fmt_symbol(),
                        expected: expected.fmt_symbol(),
                    });
                }
            }
        }
    }
    Ok(BasisMap { classical: classical.to_vec(), hatted, q0: q0.clone(), q0_inv })
}

/// `entries[i][j][k]`: coefficient of `ĉ_k` in `ĉ_i ∘ ĉ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTable<C: Coeff> {
    pub basis: Vec<DMono>,
    pub entries: Vec<Vec<Vec<C>>>,
}

impl<C: Coeff> ProductTable<C> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn product(&self, i: usize, j: usize) -> &[C] {
        &self.entries[i][j]
    }

    /// `ĉ_i ∘ ĉ_j` transported to `𝒜₀`, as a polynomial in `b`.
    pub fn product_class(&self, i: usize, j: usize) -> Operator<C> {
        coords_to_class(&self.basis, &self.entries[i][j])
    }

    pub fn map<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<ProductTable<D>, E> {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(&f).collect::<Result<Vec<_>, E>>()).collect::<Result<Vec<_>, E>>())
            .collect::<Result<Vec<_>, E>>()?;
        Ok(ProductTable { basis: self.basis.clone(), entries })
    }

    pub fn at_q_zero(&self) -> Result<Self, ScalarError> {
        self.map(|c| c.at_q_zero())
    }
}

fn coords_to_class<C: Coeff>(basis: &[DMono], coords: &[C]) -> Operator<C> {
    let ctx = coords[0].ctx().clone();
    let r = basis[0].exps().len();
    Operator::from_terms(&ctx, r, basis.iter().cloned().zip(coords.iter().cloned()))
}

/// `b^a` evaluated on the `ω̂` matrices.
fn omega_power<C: Coeff>(omega_hat: &[Matrix<C>], a: &DMono) -> Matrix<C> {
    let ctx = omega_hat[0].ctx();
    let mut m = Matrix::identity(ctx, omega_hat[0].rows());
    for (i, &e) in a.exps().iter().enumerate() {
        for _ in 0..e {
            m = m.mul(&omega_hat[i]);
        }
    }
    m
}

/// Matrix of multiplication by each `ĉ_j`: `Σ_l (Q₀⁻¹)_{lj} ω̂^{a_l}`.
pub fn multiplication_matrices<C: Coeff>(omega_hat: &[Matrix<C>], bm: &BasisMap<C>) -> Vec<Matrix<C>> {
    let n = bm.rank();
    let powers: Vec<Matrix<C>> = bm.classical.iter().map(|a| omega_power(omega_hat, a)).collect();
    par_range(n, |j| {
        let mut m = Matrix::zeros(bm.q0.ctx(), n, n);
        for (l, p) in powers.iter().enumerate() {
            let c = bm.q0_inv.get(l, j);
            if !c.is_zero() {
                m = m.add(&p.scale(c));
            }
        }
        m
    })
}

/// Table from `ω̂` alone: column `i` of `M(ĉ_j)` is `ĉ_j ∘ ĉ_i`.
pub fn table_from_omega<C: Coeff>(omega_hat: &[Matrix<C>], bm: &BasisMap<C>) -> ProductTable<C> {
    let mults = multiplication_matrices(omega_hat, bm);
    let n = bm.rank();
    let entries = (0..n).map(|i| (0..n).map(|j| mults[j].column(i)).collect()).collect();
    ProductTable { basis: bm.classical.clone(), entries }
}

/// Table by reducing `ĉ_i ĉ_j` modulo the commutative Gröbner basis of `𝒜̂`.
pub fn table_from_reduction<C: Coeff>(gb: &GroebnerBasis<C>, bm: &BasisMap<C>) -> Result<ProductTable<C>, ProductsError> {
    match gb.staircase() {
        Staircase::Finite(s) if s == bm.classical => {}
        _ => return Err(ProductsError::StaircaseMismatch),
    }
    let n = bm.rank();
    let cells = par_range(n * n, |k| {
        let (i, j) = (k / n, k % n);
        if j < i {
            return Ok(Vec::new());
        }
        let prod = bm.hatted[i].mul(&bm.hatted[j], Mode::Commutative);
        let y = gb.coordinates(&prod, &bm.classical)?;
        Ok(bm.q0.mul_vec(&y))
    });
    let mut entries = vec![vec![Vec::new(); n]; n];
    for (k, cell) in cells.into_iter().enumerate() {
        let (i, j) = (k / n, k % n);
        if j >= i {
            let v: Vec<C> = cell.map_err(ProductsError::Groebner)?;
            entries[j][i] = v.clone();
            entries[i][j] = v;
        }
    }
    Ok(ProductTable { basis: bm.classical.clone(), entries })
}

/// Cup-product table of `𝒜₀ = ℂ[b]/(relations at q = 0)` on the monomial basis.
pub fn classical_table<C: Coeff>(relations: &[Operator<C>], basis: &[DMono], step_cap: usize) -> Result<ProductTable<C>, ProductsError> {
    let ctx = relations[0].ctx().clone();
    let r = relations[0].nvars();
    let at_zero = relations
        .iter()
        .map(|p| p.map_coeffs(&ctx, |c| c.at_q_zero()))
        .collect::<Result<Vec<_>, _>>()?;
    let gb = buchberger(&ctx, r, &at_zero, Mode::Commutative, step_cap)?;
    match gb.staircase() {
        Staircase::Finite(s) if s == basis => {}
        _ => return Err(ProductsError::StaircaseMismatch),
    }
    let n = basis.len();
    let mut entries = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = Operator::monomial(C::one(&ctx), basis[i].mul(&basis[j]));
            entries[i][j] = gb.coordinates(&prod, basis)?;
        }
    }
    Ok(ProductTable { basis: basis.to_vec(), entries })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductsResult<C: Coeff> {
    pub relations: Vec<Operator<C>>,
    pub algebra: GroebnerBasis<C>,
    pub basis_map: BasisMap<C>,
    pub table: ProductTable<C>,
    pub classical: ProductTable<C>,
}

/// Runs both evaluation paths and all table checks.
pub fn structure_constants<C: Coeff>(
    ops: &[Operator<C>],
    q0: &Matrix<C>,
    omega_hat: &[Matrix<C>],
    basis: &[DMono],
    grading: &Grading,
    step_cap: usize,
) -> Result<ProductsResult<C>, ProductsError> {
    let ctx = q0.ctx().clone();
    let r = grading.num_vars();
    for i in 0..r {
        for j in i + 1..r {
            if !omega_hat[i].commutator(&omega_hat[j]).is_zero() {
                return Err(ProductsError::NonCommuting { i: i + 1, j: j + 1 });
            }
        }
    }
    let relations = dequantize_relations(ops)?;
    let algebra = buchberger(&ctx, r, &relations, Mode::Commutative, step_cap)?;
    let bm = hatted_basis(q0, basis, grading)?;
    let table = table_from_omega(omega_hat, &bm);
    let reduced = table_from_reduction(&algebra, &bm)?;
    let n = bm.rank();
    for i in 0..n {
        for j in 0..n {
            if table.entries[i][j] != reduced.entries[i][j] {
                return Err(ProductsError::InconsistentTable { i, j });
            }
            if table.entries[i][j] != table.entries[j][i] {
                return Err(ProductsError::Asymmetric { i, j });
            }
        }
        let unit: Vec<C> = (0..n).map(|k| if k == i { C::one(&ctx) } else { C::zero(&ctx) }).collect();
        if table.entries[0][i] != unit {
            return Err(ProductsError::IdentityFails);
        }
    }
    let classical = classical_table(&relations, basis, step_cap)?;
    let at_zero = table.at_q_zero()?;
    for i in 0..n {
        for j in 0..n {
            if at_zero.entries[i][j] != classical.entries[i][j] {
                return Err(ProductsError::ClassicalMismatch { i, j });
            }
            for k in 0..n {
                let expected = 2 * (basis[i].degree() as i64 + basis[j].degree() as i64 - basis[k].degree() as i64);
                let c = &table.entries[i][j][k];
                if !c.is_zero() && !c.homogeneity(grading).admits(expected) {
                    return Err(ProductsError::DegreeDefect { i, j, k });
                }
            }
        }
    }
    Ok(ProductsResult { relations, algebra, basis_map: bm, table, classical })
}

/// `x ∘ y` for classes given as polynomials in `b` over the classical basis.
pub fn quantum_product_eval<C: Coeff>(x: &Operator<C>, y: &Operator<C>, table: &ProductTable<C>) -> Operator<C> {
    let ctx = x.ctx().clone();
    let n = table.rank();
    let mut acc = vec![C::zero(&ctx); n];
    for (i, a) in table.basis.iter().enumerate() {
        let xi = x.coeff(a);
        if xi.is_zero() {
            continue;
        }
        for (j, b) in table.basis.iter().enumerate() {
            let yj = y.coeff(b);
            if yj.is_zero() {
                continue;
            }
            let s = xi.mul(&yj);
            for (k, c) in table.entries[i][j].iter().enumerate() {
                acc[k] = acc[k].add(&s.mul(c));
            }
        }
    }
    coords_to_class(&table.basis, &acc)
}

/// Structure constants re-expressed in the original coordinates `q`.
pub fn pull_back(table: &ProductTable<Series>, forward: &[Series]) -> Result<ProductTable<Series>, ScalarError> {
    table.map(|c| c.substitute(forward))
}
