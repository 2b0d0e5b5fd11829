//! Gauge transformation `L₊ = Q₀(I + hQ₁ + h²Q₂ + ...)` to Dubrovin form.
//!
//! `L₊` is determined by `(1/h) ω̂ L₊ = L₊ Ω − dL₊` together with
//! `L₊|_{q=0} = I`. Writing `L₊ = Σ_k h^k L_k` and expanding every matrix in
//! `q`, the coefficient `G_{m,k}` of `q^m h^k` in `L₊` satisfies, for every
//! direction `i`,
//!
//! ```text
//! m_i G_{m,k} + [ω_i(0), G_{m,k+1}] = known(lower monomials)
//! ```
//!
//! and the `q^m` coefficient of `ω̂_i` is read off the `h^{-1}` equation. The
//! recursion runs over monomials in increasing total exponent, and within a
//! monomial from the largest admissible `h`-power down to `h^0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeff::{Coeff, Grading, RatFunc, ScalarError, Series, SeriesCtx};
use crate::connection::{exterior_derivative, h_decompose, wedge, HDecomposition};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaugeError {
    #[error("directions disagree on the coefficient of q^{monomial:?} (direction {direction})")]
    NonIntegrable { monomial: Vec<u32>, direction: usize },
    #[error("θ_{direction} does not vanish at q = 0, so no gauge with L₊(0) = I exists")]
    UnreachableConstantTerm { direction: usize },
    #[error("coefficient of q^{monomial:?} h^{h_power} has no solution of the mandated degree")]
    DegreeObstruction { monomial: Vec<u32>, h_power: usize },
    #[error("rational mode needs all |q_i| >= 1")]
    RequiresSeriesMode,
    #[error("gauge postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Dense rational matrix used for the per-monomial recursion.
#[derive(Clone, Debug, PartialEq)]
struct RMat {
    n: usize,
    data: Vec<BigRational>,
}

impl RMat {
    fn zero(n: usize) -> Self {
        RMat { n, data: vec![BigRational::zero(); n * n] }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn add_assign(&mut self, o: &RMat) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
    }

    fn sub_assign(&mut self, o: &RMat) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a -= b;
        }
    }

    fn scale(&self, s: &BigRational) -> RMat {
        RMat { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    fn mul(&self, o: &RMat) -> RMat {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    fn commutator(&self, o: &RMat) -> RMat {
        let mut out = self.mul(o);
        out.sub_assign(&o.mul(self));
        out
    }
}

type Coeffs = BTreeMap<Vec<u32>, RMat>;

/// Splits an `h`-free series matrix into its `q^m` coefficient matrices.
fn split(m: &Matrix<Series>) -> Result<Coeffs, ScalarError> {
    let n = m.rows();
    let mut out: Coeffs = BTreeMap::new();
    for (i, j, s) in m.entries() {
        for (q, h, c) in s.terms() {
            if h != 0 {
                return Err(ScalarError::NotLaurentInH(s.to_string()));
            }
            out.entry(q.to_vec()).or_insert_with(|| RMat::zero(n)).data[i * n + j] = c.clone();
        }
    }
    Ok(out)
}

fn assemble(ctx: &SeriesCtx, n: usize, coeffs: &Coeffs) -> Matrix<Series> {
    Matrix::from_fn(ctx, n, n, |i, j| {
        Series::from_terms(ctx, coeffs.iter().map(|(q, m)| (q.clone(), 0, m.data[i * n + j].clone())))
    })
}

fn divisors(m: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &e in m {
        let mut next = Vec::new();
        for p in &out {
            for k in 0..=e {
                let mut v = p.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn difference(m: &[u32], d: &[u32]) -> Vec<u32> {
    m.iter().zip(d).map(|(a, b)| a - b).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeSolution<C: Coeff> {
    /// `L₊ = Σ_k h^k l_plus[k]`.
    pub l_plus: Vec<Matrix<C>>,
    /// `Q_1, Q_2, ...` with `L₊ = Q₀(I + hQ₁ + ...)`.
    pub q: Vec<Matrix<C>>,
    pub omega_hat: Vec<Matrix<C>>,
}

impl<C: Coeff> GaugeSolution<C> {
    pub fn q0(&self) -> &Matrix<C> {
        &self.l_plus[0]
    }

    pub fn is_trivial(&self) -> bool {
        self.l_plus.len() == 1 && self.l_plus[0].is_identity()
    }

    /// `L₊` as a single matrix with explicit powers of `h`.
    pub fn l_plus_matrix(&self) -> Matrix<C> {
        let ctx = self.l_plus[0].ctx().clone();
        let mut acc = Matrix::zeros(&ctx, self.l_plus[0].rows(), self.l_plus[0].cols());
        for (k, l) in self.l_plus.iter().enumerate() {
            acc = acc.add(&l.scale(&C::h_pow(&ctx, k as i32)));
        }
        acc
    }
}

fn finish<C: Coeff>(l_plus: Vec<Matrix<C>>, omega_hat: Vec<Matrix<C>>) -> Result<GaugeSolution<C>, GaugeError> {
    let q0_inv = l_plus[0].inverse()?;
    let q = l_plus[1..].iter().map(|l| q0_inv.mul(l)).collect();
    Ok(GaugeSolution { l_plus, q, omega_hat })
}

/// Residual `(1/h) ω̂_i L₊ − L₊ Ω_i + ∂_i L₊` of the defining equation.
pub fn defining_residual<C: Coeff>(sol: &GaugeSolution<C>, omega_full: &[Matrix<C>]) -> Vec<Matrix<C>> {
    let ctx = sol.l_plus[0].ctx().clone();
    let l = sol.l_plus_matrix();
    let h_inv = C::h_pow(&ctx, -1);
    omega_full
        .iter()
        .enumerate()
        .map(|(i, om)| sol.omega_hat[i].scale(&h_inv).mul(&l).sub(&l.mul(om)).add(&l.euler(i)))
        .collect()
}

/// Solves for `L₊` and `ω̂` over truncated series.
pub fn solve_gauge_series(
    hd: &HDecomposition<Series>,
    blocks: &[usize],
    grading: &Grading,
) -> Result<GaugeSolution<Series>, GaugeError> {
    let ctx = hd.omega[0].ctx().clone();
    let n = hd.omega[0].rows();
    let r = hd.omega.len();
    let v = blocks.iter().copied().max().unwrap_or(0) as i64;

    if hd.theta_is_zero() {
        let l = vec![Matrix::identity(&ctx, n)];
        return finish(l, hd.omega.clone());
    }

    let w: Vec<Coeffs> = hd.omega.iter().map(split).collect::<Result<_, _>>()?;
    let th: Vec<Vec<Coeffs>> =
        hd.theta.iter().map(|lvl| lvl.iter().map(split).collect::<Result<Vec<_>, _>>()).collect::<Result<_, _>>()?;
    let zero_mono = vec![0u32; r];
    for lvl in &th {
        for (i, t) in lvl.iter().enumerate() {
            if t.get(&zero_mono).is_some_and(|m| !m.is_zero()) {
                return Err(GaugeError::UnreachableConstantTerm { direction: i });
            }
        }
    }
    let zero = RMat::zero(n);
    let w0: Vec<RMat> = w.iter().map(|c| c.get(&zero_mono).cloned().unwrap_or_else(|| zero.clone())).collect();

    // g[m][k] = coefficient of q^m h^k in L₊; what[m][i] = coefficient of q^m in ω̂_i
    let mut g: BTreeMap<Vec<u32>, Vec<RMat>> = BTreeMap::new();
    let mut what: BTreeMap<Vec<u32>, Vec<RMat>> = BTreeMap::new();
    g.insert(zero_mono.clone(), vec![RMat::identity(n)]);
    what.insert(zero_mono.clone(), w0.clone());

    let monomials = ctx.monomials();
    for m in monomials.iter().filter(|m| m.iter().any(|&e| e > 0)) {
        let deg = grading.degree_of(m, 0);
        let kmax = (v + (0i64).max((-deg + 1).div_euclid(2))) as usize;
        let lower_len = divisors(m)
            .iter()
            .filter(|d| *d != m)
            .filter_map(|d| g.get(d).map(Vec::len))
            .max()
            .unwrap_or(1);
        let nbound = (kmax + 1).max(lower_len + hd.theta.len() + 1);

        let gk = |mono: &Vec<u32>, k: usize| -> Option<&RMat> { g.get(mono).and_then(|v| v.get(k)) };
        // R(i, n): known part of the q^m coefficient of the h^{n-1} equation
        let known = |i: usize, level: usize| -> RMat {
            let mut acc = RMat::zero(n);
            for m1 in divisors(m) {
                let m2 = difference(m, &m1);
                if m1 == *m {
                    continue;
                }
                if m2 != *m {
                    if let (Some(a), Some(b)) = (what.get(&m1).map(|x| &x[i]), gk(&m2, level)) {
                        acc.add_assign(&a.mul(b));
                    }
                }
                if let (Some(a), Some(b)) = (gk(&m1, level), w[i].get(&m2)) {
                    acc.sub_assign(&a.mul(b));
                }
                for (k, lvl) in th.iter().enumerate() {
                    if level < 1 + k {
                        break;
                    }
                    if let (Some(a), Some(b)) = (gk(&m1, level - 1 - k), lvl[i].get(&m2)) {
                        acc.sub_assign(&a.mul(b));
                    }
                }
            }
            acc
        };
        let rk: Vec<Vec<RMat>> = (0..r).map(|i| (0..=nbound).map(|lvl| known(i, lvl)).collect()).collect();

        let pivot = m.iter().position(|&e| e > 0).expect("nonzero monomial");
        let inv_mi = BigRational::new(BigInt::one(), BigInt::from(m[pivot]));
        let mut sol = vec![RMat::zero(n); kmax + 2];
        for level in (1..=kmax + 1).rev() {
            let mut rhs = rk[pivot][level].clone();
            rhs.add_assign(&w0[pivot].commutator(&sol[level]));
            sol[level - 1] = rhs.scale(&-inv_mi.clone());
        }
        sol.truncate(kmax + 1);
        let at = |lvl: usize| sol.get(lvl).cloned().unwrap_or_else(|| RMat::zero(n));
        for i in 0..r {
            for (level, rkl) in rk[i].iter().enumerate().take(nbound + 1).skip(1) {
                let mut e = rkl.clone();
                e.add_assign(&w0[i].commutator(&at(level)));
                e.add_assign(&at(level - 1).scale(&BigRational::from_integer(BigInt::from(m[i]))));
                if !e.is_zero() {
                    return Err(if i == pivot && level > kmax + 1 {
                        GaugeError::DegreeObstruction { monomial: m.clone(), h_power: level - 1 }
                    } else {
                        GaugeError::NonIntegrable { monomial: m.clone(), direction: i }
                    });
                }
            }
        }
        let hat: Vec<RMat> = (0..r)
            .map(|i| {
                let mut x = rk[i][0].clone();
                x.add_assign(&w0[i].commutator(&at(0)));
                x.scale(&-BigRational::one())
            })
            .collect();
        while sol.last().is_some_and(RMat::is_zero) {
            sol.pop();
        }
        g.insert(m.clone(), sol);
        what.insert(m.clone(), hat);
    }

    let depth = g.values().map(Vec::len).max().unwrap_or(1);
    let l_plus: Vec<Matrix<Series>> = (0..depth)
        .map(|k| {
            let level: Coeffs = g.iter().filter_map(|(m, v)| v.get(k).map(|x| (m.clone(), x.clone()))).collect();
            assemble(&ctx, n, &level)
        })
        .collect();
    let omega_hat: Vec<Matrix<Series>> = (0..r)
        .map(|i| {
            let c: Coeffs = what.iter().map(|(m, v)| (m.clone(), v[i].clone())).collect();
            assemble(&ctx, n, &c)
        })
        .collect();
    let sol = finish(l_plus, omega_hat)?;
    let residual = defining_residual(&sol, &hd.reconstruct());
    if let Some(i) = residual.iter().position(|m| !m.is_zero()) {
        return Err(GaugeError::PostconditionFailed(format!("defining equation fails in direction {}", i + 1)));
    }
    Ok(sol)
}

/// Exact solve for positively graded problems: `L₊` and `ω̂` are polynomial
/// in `q` of bounded degree, so a finite series computation determines them;
/// the result is then re-verified in exact rational arithmetic.
pub fn solve_gauge_rational(
    hd: &HDecomposition<RatFunc>,
    blocks: &[usize],
    grading: &Grading,
) -> Result<GaugeSolution<RatFunc>, GaugeError> {
    if !grading.all_at_least(1) {
        return Err(GaugeError::RequiresSeriesMode);
    }
    let nq = grading.num_vars();
    let n = hd.omega[0].rows();
    if hd.theta_is_zero() {
        return finish(vec![Matrix::identity(&nq, n)], hd.omega.clone());
    }
    let v = blocks.iter().copied().max().unwrap_or(0) as u32;
    let ctx = SeriesCtx::for_grading(grading, 2 * (v + 1));
    let hs = hd.map(&ctx, |c| c.to_series(&ctx))?;
    let sol = solve_gauge_series(&hs, blocks, grading)?;
    let l_plus: Vec<Matrix<RatFunc>> = sol.l_plus.iter().map(|m| m.map(&nq, RatFunc::from_series)).collect();
    let q0 = &l_plus[0];
    let q0_inv = q0.inverse()?;
    let omega_hat: Vec<Matrix<RatFunc>> = hd.omega.iter().map(|w| q0.mul(w).mul(&q0_inv)).collect();
    let exact = finish(l_plus, omega_hat)?;
    let residual = defining_residual(&exact, &hd.reconstruct());
    if let Some(i) = residual.iter().position(|m| !m.is_zero()) {
        return Err(GaugeError::PostconditionFailed(format!(
            "L₊ is not polynomial of the expected degree (direction {})",
            i + 1
        )));
    }
    Ok(exact)
}

/// Solves `∂_i Q₀ = Q₀ θ_i` with `Q₀(0) = I`, monomial by monomial.
pub fn solve_theta_gauge(theta: &[Matrix<Series>]) -> Result<Matrix<Series>, GaugeError> {
    let ctx = theta[0].ctx().clone();
    let n = theta[0].rows();
    let r = theta.len();
    let th: Vec<Coeffs> = theta.iter().map(split).collect::<Result<_, _>>()?;
    let zero_mono = vec![0u32; r];
    for (i, t) in th.iter().enumerate() {
        if t.get(&zero_mono).is_some_and(|m| !m.is_zero()) {
            return Err(GaugeError::UnreachableConstantTerm { direction: i });
        }
    }
    let mut c: Coeffs = BTreeMap::new();
    c.insert(zero_mono, RMat::identity(n));
    for m in ctx.monomials().iter().filter(|m| m.iter().any(|&e| e > 0)) {
        let rhs = |i: usize| {
            let mut acc = RMat::zero(n);
            for m1 in divisors(m) {
                if m1 == *m {
                    continue;
                }
                if let (Some(a), Some(b)) = (c.get(&m1), th[i].get(&difference(m, &m1))) {
                    acc.add_assign(&a.mul(b));
                }
            }
            acc
        };
        let pivot = m.iter().position(|&e| e > 0).expect("nonzero monomial");
        let value = rhs(pivot).scale(&BigRational::new(BigInt::one(), BigInt::from(m[pivot])));
        for i in 0..r {
            let mut e = value.scale(&BigRational::from_integer(BigInt::from(m[i])));
            e.sub_assign(&rhs(i));
            if !e.is_zero() {
                return Err(GaugeError::NonIntegrable { monomial: m.clone(), direction: i });
            }
        }
        if !value.is_zero() {
            c.insert(m.clone(), value);
        }
    }
    Ok(assemble(&ctx, n, &c))
}

/// `Ω̂_i = L Ω_i L⁻¹ − (∂_i L) L⁻¹`.
pub fn apply_gauge<C: Coeff>(omega: &[Matrix<C>], l: &Matrix<C>) -> Result<Vec<Matrix<C>>, GaugeError> {
    let l_inv = l.inverse()?;
    Ok(omega
        .iter()
        .enumerate()
        .map(|(i, om)| l.mul(om).mul(&l_inv).sub(&l.euler(i).mul(&l_inv)))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DubrovinReport {
    /// The connection is `(1/h)` times an `h`-free matrix.
    pub pure_pole: bool,
    pub closed: bool,
    pub wedge_zero: bool,
    pub pass: bool,
}

pub fn verify_dubrovin_form<C: Coeff>(omega_full: &[Matrix<C>]) -> Result<DubrovinReport, GaugeError> {
    let hd = h_decompose(omega_full).map_err(|e| GaugeError::PostconditionFailed(e.to_string()))?;
    let pure_pole = hd.theta_is_zero();
    let closed = exterior_derivative(&hd.omega).iter().all(|(_, m)| m.is_zero());
    let wedge_zero = wedge(&hd.omega).iter().all(|(_, m)| m.is_zero());
    Ok(DubrovinReport { pure_pole, closed, wedge_zero, pass: pure_pole && closed && wedge_zero })
}

/// Which vanishing profile the grading predicts for `L₊`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// All `|q_i| >= 4`: `(Q₀ − I)_{α,β} = 0` for `α >= β − 1`, `(Q_k)_{α,β} = 0` for `α >= β − k − 1`.
    Strict,
    /// Some `|q_i| = 2`, all `>= 2`: the bounds relax by one.
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileReport {
    pub profile: Option<Profile>,
    pub violations: Vec<String>,
    /// Every entry of `L_k` is homogeneous of degree `2(β − α − k)`.
    pub homogeneous: bool,
    pub pass: bool,
}

pub fn check_block_profile<C: Coeff>(sol: &GaugeSolution<C>, blocks: &[usize], grading: &Grading) -> ProfileReport {
    let degrees = grading.q_degrees();
    let profile = if degrees.iter().all(|&d| d >= 4) {
        Some(Profile::Strict)
    } else if degrees.iter().all(|&d| d >= 2) && degrees.contains(&2) {
        Some(Profile::Relaxed)
    } else {
        None
    };
    let mut violations = Vec::new();
    if let Some(p) = profile {
        let slack = match p {
            Profile::Strict => 1,
            Profile::Relaxed => 0,
        };
        let ctx = sol.q0().ctx().clone();
        let n = sol.q0().rows();
        let x = sol.q0().sub(&Matrix::identity(&ctx, n));
        let mut mats = vec![(0usize, &x)];
        mats.extend(sol.q.iter().enumerate().map(|(k, m)| (k + 1, m)));
        for (k, m) in mats {
            for (i, j, c) in m.entries() {
                let (a, b) = (blocks[i] as i64, blocks[j] as i64);
                if !c.is_zero() && a >= b - k as i64 - slack {
                    violations.push(format!("Q_{k} entry ({i}, {j}) should vanish"));
                }
            }
        }
    }
    let mut homogeneous = true;
    for (k, l) in sol.l_plus.iter().enumerate() {
        for (i, j, c) in l.entries() {
            let expected = 2 * (blocks[j] as i64 - blocks[i] as i64 - k as i64);
            if !c.homogeneity(grading).admits(expected) {
                homogeneous = false;
            }
        }
    }
    ProfileReport { profile, pass: violations.is_empty() && homogeneous, violations, homogeneous }
}
