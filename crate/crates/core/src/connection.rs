//! Connection matrices of the `∂_i`-action on the standard-monomial basis.
//!
//! Column `j` of `Ω_i` holds the coordinates of `∂_i P_j`, where `P_j` runs
//! over the standard monomials in increasing order. Block `α` of a basis
//! element is its order in `h∂`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeff::{Coeff, Grading, Homogeneity, ScalarError};
use crate::matrix::Matrix;
use crate::ore::{DMono, GroebnerBasis, GroebnerError, Mode, Operator, Staircase};
use crate::par::par_range;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("the module has infinite rank")]
    InfiniteRank,
    #[error("the module has rank 0")]
    ZeroRank,
    #[error("entry ({row}, {col}) of Ω_{var} has a pole of order {order} in h")]
    DeepPole { var: usize, row: usize, col: usize, order: u32 },
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connection<C: Coeff> {
    pub basis: Vec<DMono>,
    pub omega: Vec<Matrix<C>>,
}

impl<C: Coeff> Connection<C> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn nvars(&self) -> usize {
        self.omega.len()
    }

    /// `h∂`-order of each basis element.
    pub fn blocks(&self) -> Vec<usize> {
        self.basis.iter().map(|m| m.degree() as usize).collect()
    }

    /// Position of `h∂_k` in the basis.
    pub fn position_of_var(&self, k: usize) -> Option<usize> {
        let target = DMono::var(self.nvars(), k);
        self.basis.iter().position(|m| *m == target)
    }

    pub fn map<D: Coeff, E>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> Result<D, E> + Copy) -> Result<Connection<D>, E> {
        Ok(Connection {
            basis: self.basis.clone(),
            omega: self.omega.iter().map(|m| m.try_map(ctx, f)).collect::<Result<_, _>>()?,
        })
    }
}

/// Reads off `Ω_i` from the normal forms of `D_i P_j`.
pub fn connection_matrices<C: Coeff>(gb: &GroebnerBasis<C>) -> Result<Connection<C>, ConnectionError> {
    let basis = match gb.staircase() {
        Staircase::Infinite => return Err(ConnectionError::InfiniteRank),
        Staircase::Finite(b) if b.is_empty() => return Err(ConnectionError::ZeroRank),
        Staircase::Finite(b) => b,
    };
    let r = gb.nvars();
    let n = basis.len();
    let ctx = gb.ctx().clone();
    let h_inv = C::h_pow(&ctx, -1);
    let columns = par_range(r * n, |k| {
        let (i, j) = (k / n, k % n);
        let p = Operator::monomial(C::one(&ctx), basis[j].clone());
        let dp = Operator::d(&ctx, r, i).mul(&p, Mode::Ore);
        gb.coordinates(&dp, &basis)
    });
    let mut omega = vec![Matrix::zeros(&ctx, n, n); r];
    for (k, col) in columns.into_iter().enumerate() {
        let (i, j) = (k / n, k % n);
        for (row, c) in col?.into_iter().enumerate() {
            omega[i].set(row, j, c.mul(&h_inv));
        }
    }
    Ok(Connection { basis, omega })
}

/// `Ω = (1/h) ω + θ^(0) + h θ^(1) + ... + h^p θ^(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HDecomposition<C: Coeff> {
    pub omega: Vec<Matrix<C>>,
    /// `theta[k][i]` is `θ^(k)_i`; always at least one level.
    pub theta: Vec<Vec<Matrix<C>>>,
}

impl<C: Coeff> HDecomposition<C> {
    pub fn p(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn theta_is_zero(&self) -> bool {
        self.theta.iter().flatten().all(Matrix::is_zero)
    }

    pub fn reconstruct(&self) -> Vec<Matrix<C>> {
        let ctx = self.omega[0].ctx().clone();
        (0..self.omega.len())
            .map(|i| {
                let mut m = self.omega[i].scale(&C::h_pow(&ctx, -1));
                for (k, level) in self.theta.iter().enumerate() {
                    m = m.add(&level[i].scale(&C::h_pow(&ctx, k as i32)));
                }
                m
            })
            .collect()
    }

    pub fn map<D: Coeff, E>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> Result<D, E> + Copy) -> Result<HDecomposition<D>, E> {
        let conv = |ms: &Vec<Matrix<C>>| ms.iter().map(|m| m.try_map(ctx, f)).collect::<Result<Vec<_>, E>>();
        Ok(HDecomposition {
            omega: conv(&self.omega)?,
            theta: self.theta.iter().map(conv).collect::<Result<_, _>>()?,
        })
    }
}

pub fn h_decompose<C: Coeff>(omega: &[Matrix<C>]) -> Result<HDecomposition<C>, ConnectionError> {
    let ctx = omega[0].ctx().clone();
    let n = omega[0].rows();
    let mut parts: Vec<BTreeMap<i32, Matrix<C>>> = Vec::new();
    for (var, m) in omega.iter().enumerate() {
        for (row, col, c) in m.entries() {
            if let Some(&k) = c.h_coefficients()?.keys().next() {
                if k < -1 {
                    return Err(ConnectionError::DeepPole { var, row, col, order: k.unsigned_abs() });
                }
            }
        }
        parts.push(m.h_coefficients()?);
    }
    let p = parts.iter().filter_map(|m| m.keys().next_back().copied()).max().unwrap_or(0).max(0) as usize;
    let zero = Matrix::zeros(&ctx, n, n);
    let get = |i: usize, k: i32| parts[i].get(&k).cloned().unwrap_or_else(|| zero.clone());
    Ok(HDecomposition {
        omega: (0..omega.len()).map(|i| get(i, -1)).collect(),
        theta: (0..=p).map(|k| (0..omega.len()).map(|i| get(i, k as i32)).collect()).collect(),
    })
}

/// Curvature components `∂_iΩ_j − ∂_jΩ_i + [Ω_i, Ω_j]` for `i < j`.
pub fn curvature<C: Coeff>(omega: &[Matrix<C>]) -> Vec<((usize, usize), Matrix<C>)> {
    let mut out = Vec::new();
    for i in 0..omega.len() {
        for j in i + 1..omega.len() {
            let r = omega[j].euler(i).sub(&omega[i].euler(j)).add(&omega[i].commutator(&omega[j]));
            out.push(((i, j), r));
        }
    }
    out
}

/// `[ω_i, ω_j]` for `i < j`: the components of `ω ∧ ω`.
pub fn wedge<C: Coeff>(omega: &[Matrix<C>]) -> Vec<((usize, usize), Matrix<C>)> {
    let mut out = Vec::new();
    for i in 0..omega.len() {
        for j in i + 1..omega.len() {
            out.push(((i, j), omega[i].commutator(&omega[j])));
        }
    }
    out
}

/// `∂_iω_j − ∂_jω_i` for `i < j`: the components of `dω`.
pub fn exterior_derivative<C: Coeff>(omega: &[Matrix<C>]) -> Vec<((usize, usize), Matrix<C>)> {
    let mut out = Vec::new();
    for i in 0..omega.len() {
        for j in i + 1..omega.len() {
            out.push(((i, j), omega[j].euler(i).sub(&omega[i].euler(j))));
        }
    }
    out
}

pub fn all_zero<C: Coeff>(components: &[((usize, usize), Matrix<C>)]) -> bool {
    components.iter().all(|(_, m)| m.is_zero())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport<C: Coeff> {
    pub residuals: Vec<((usize, usize), Matrix<C>)>,
    pub flat: bool,
}

pub fn check_flatness<C: Coeff>(omega: &[Matrix<C>]) -> FlatnessReport<C> {
    let residuals = curvature(omega);
    let flat = all_zero(&residuals);
    FlatnessReport { residuals, flat }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryDefect {
    pub var: usize,
    pub row: usize,
    pub col: usize,
    pub expected: i64,
    pub found: Homogeneity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub defects: Vec<EntryDefect>,
    pub pass: bool,
}

/// Entry `(α, β)` must be homogeneous of degree `2(β − α)` in block indices,
/// and blocks with `α >= β + 2` must vanish.
pub fn check_degree_homogeneity<C: Coeff>(omega: &[Matrix<C>], blocks: &[usize], grading: &Grading) -> HomogeneityReport {
    let mut defects = Vec::new();
    for (var, m) in omega.iter().enumerate() {
        for (row, col, c) in m.entries() {
            if c.is_zero() {
                continue;
            }
            let (a, b) = (blocks[row] as i64, blocks[col] as i64);
            let expected = 2 * (b - a);
            let found = c.homogeneity(grading);
            if a >= b + 2 || !found.admits(expected) {
                defects.push(EntryDefect { var, row, col, expected, found });
            }
        }
    }
    HomogeneityReport { pass: defects.is_empty(), defects }
}
