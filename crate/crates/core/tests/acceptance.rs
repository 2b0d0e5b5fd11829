//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.
//!
//! All comparisons are exact (rational arithmetic, tolerance 0). Series
//! comparisons are coefficient-by-coefficient up to the stated order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use qdm_core::coeff::{Coeff, RatFunc, Series, SeriesCtx};
use qdm_core::connection::{check_degree_homogeneity, check_flatness, exterior_derivative, wedge};
use qdm_core::matrix::Matrix;
use qdm_core::ore::{buchberger, DMono, Mode, Operator, Staircase};
use qdm_core::parse::{parse_operator, parse_relation};
use qdm_core::pipeline::{run_full_pipeline, Gauged, MirrorOutcome, PipelineResult, ProductsOutcome};
use qdm_core::problem::{bundled, bundled_names, parse_problem, Overrides};
use qdm_core::products::{classical_table, hatted_basis, table_from_omega, table_from_reduction, ProductsResult};
use qdm_core::report::{emit_report, Format};

const ORDER: u32 = 8;
const RANDOM_INSTANCES: usize = 100;
const SEED: u64 = 0x5167_2a11;

#[derive(Deserialize)]
struct Golden {
    groebner: GoldenGroebner,
    connection: GoldenConnection,
    gauge: GoldenGauge,
    mirror: GoldenMirror,
    products: Vec<GoldenProduct>,
}

#[derive(Deserialize)]
struct GoldenGroebner {
    basis: Vec<String>,
    standard_monomials: Vec<String>,
}

#[derive(Deserialize)]
struct GoldenConnection {
    h_omega1: Vec<Vec<String>>,
    h_omega2: Vec<Vec<String>>,
    theta1: Vec<(usize, usize, String)>,
}

#[derive(Deserialize)]
struct GoldenGauge {
    q0_inverse: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct GoldenMirror {
    old_q: Vec<String>,
    operators: Vec<String>,
    algebra: Vec<String>,
    h_omega1: Vec<Vec<String>>,
    h_omega2: Vec<Vec<String>>,
    q0_inverse: Vec<Vec<String>>,
    omega_hat1: Vec<Vec<String>>,
    omega_hat2: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct GoldenProduct {
    left: String,
    right: String,
    expected: String,
    report: String,
}

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scalar(s: &str) -> RatFunc {
    let op = parse_operator(s, 2).unwrap_or_else(|e| panic!("golden entry {s}: {e}"));
    assert!(op.terms().all(|(m, _)| m.degree() == 0), "golden entry {s} is not a scalar");
    op.coeff(&DMono::one(2))
}

fn rat_matrix(rows: &[Vec<String>]) -> Matrix<RatFunc> {
    Matrix::from_rows(&2, rows.iter().map(|r| r.iter().map(|s| scalar(s)).collect()).collect())
}

fn h_inv(m: &Matrix<RatFunc>) -> Matrix<RatFunc> {
    m.scale(&RatFunc::h_pow(&2, -1))
}

fn to_series(m: &Matrix<RatFunc>, ctx: &SeriesCtx) -> Matrix<Series> {
    m.try_map(ctx, |c| c.to_series(ctx)).expect("expandable")
}

fn first_diff<C: Coeff>(a: &Matrix<C>, b: &Matrix<C>) -> Option<String> {
    a.entries()
        .find(|(i, j, c)| *c != b.get(*i, *j))
        .map(|(i, j, c)| format!("entry ({i}, {j}): got {}, expected {}", c.plain(), b.get(i, j).plain()))
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn catalan(n: u32) -> BigInt {
    let mut c = BigInt::one();
    for k in 0..n {
        c = c * (2 * (2 * k + 1)) / (k + 2);
    }
    c
}

/// `sqrt(1 − 4q1) = 1 − Σ_{n>=1} 2 C_{n−1} q1^n`, independent of the series code.
fn sqrt_oracle(ctx: &SeriesCtx) -> Series {
    let mut terms = vec![(vec![0, 0], 0, BigRational::one())];
    for n in 1..=ORDER {
        terms.push((vec![n, 0], 0, BigRational::from_integer(-2 * catalan(n - 1))));
    }
    Series::from_terms(ctx, terms)
}

fn sigma2() -> PipelineResult {
    run_full_pipeline(&bundled("sigma2").expect("bundled"))
}

fn golden() -> Golden {
    toml::from_str(include_str!("golden/sigma2.toml")).expect("golden file parses")
}

fn c1_groebner(r: &PipelineResult, g: &Golden) -> Check {
    ensure(r.problem.options.truncation == ORDER, "sigma2 must run at N = 8")?;
    let gb = r.groebner.as_ref().ok_or("no Gröbner basis")?;
    ensure(gb.elements().len() == g.groebner.basis.len(), format!("{} elements", gb.elements().len()))?;
    let computed: Vec<_> = gb.elements().iter().map(Operator::clear_denominators).collect();
    for s in &g.groebner.basis {
        let expected = parse_operator(s, 2).expect("golden parses").clear_denominators();
        ensure(computed.contains(&expected), format!("missing {s}"))?;
    }
    let Staircase::Finite(st) = gb.staircase() else {
        return Err("infinite staircase".into());
    };
    let json = qdm_core::report::to_json(r);
    let reported: Vec<String> = serde_json::from_value(json["groebner"]["standard_monomials"].clone()).unwrap_or_default();
    ensure(reported == g.groebner.standard_monomials, format!("standard monomials {reported:?}"))?;
    ensure(st.len() == 4, format!("rank {}", st.len()))?;
    Ok(format!("3 elements up to unit scalar, standard monomials {} (rank 4)", reported.join(", ")))
}

fn c2_connection(r: &PipelineResult, g: &Golden) -> Check {
    let c = r.connection.as_ref().ok_or("no connection")?;
    for (i, rows) in [&g.connection.h_omega1, &g.connection.h_omega2].into_iter().enumerate() {
        let expected = h_inv(&rat_matrix(rows));
        if let Some(d) = first_diff(&c.connection.omega[i], &expected) {
            return Err(format!("Ω_{}: {d}", i + 1));
        }
    }
    ensure(c.decomposition.p() == 0, format!("p = {}", c.decomposition.p()))?;
    let theta1 = &c.decomposition.theta[0][0];
    let nonzero: Vec<(usize, usize)> = theta1.entries().filter(|(_, _, v)| !v.is_zero()).map(|(i, j, _)| (i, j)).collect();
    let expected: Vec<(usize, usize)> = g.connection.theta1.iter().map(|(i, j, _)| (*i, *j)).collect();
    ensure(nonzero == expected, format!("θ_1 support {nonzero:?}"))?;
    for (i, j, v) in &g.connection.theta1 {
        ensure(*theta1.get(*i, *j) == scalar(v), format!("θ_1 ({i}, {j}) = {}", theta1.get(*i, *j)))?;
    }
    Ok("Ω_1, Ω_2 entry-for-entry; p = 0; θ_1 has exactly the two stated entries".into())
}

fn c3_gauge_mirror(r: &PipelineResult, g: &Golden) -> Check {
    let Some(Gauged::Series(gs)) = &r.gauge else {
        return Err("no series gauge".into());
    };
    let ctx = gs.q0_inverse.ctx().clone();
    ensure(ctx.order() == ORDER, "wrong truncation")?;
    let s = sqrt_oracle(&ctx);
    let half = BigRational::new(1.into(), 2.into());
    let expected = Matrix::from_rows(
        &ctx,
        g.gauge
            .q0_inverse
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e.as_str() {
                        "s" => s.clone(),
                        "(1 - s)/2" => Series::one(&ctx).sub(&s).scale(&half),
                        other => scalar(other).to_series(&ctx).expect("expandable"),
                    })
                    .collect()
            })
            .collect(),
    );
    if let Some(d) = first_diff(&gs.q0_inverse, &expected) {
        return Err(format!("Q₀⁻¹ {d}"));
    }
    let Some(MirrorOutcome::Applied(m)) = &r.mirror else {
        return Err("no coordinate change".into());
    };
    for (k, closed) in g.mirror.old_q.iter().enumerate() {
        let want = scalar(closed).to_series(&ctx).expect("expandable");
        ensure(m.change.inverse[k] == want, format!("q{} = {}", k + 1, m.change.inverse[k]))?;
    }
    let catalan_series = Series::from_terms(
        &ctx,
        (1..=ORDER).map(|n| (vec![n, 0], 0, BigRational::from_integer(catalan(n)))),
    );
    ensure(m.change.forward[0] == catalan_series, format!("q̂1 = {}", m.change.forward[0]))?;
    for (k, src) in g.mirror.operators.iter().enumerate() {
        let want = parse_operator(src, 2)
            .expect("golden parses")
            .map_coeffs(&ctx, |c| c.to_series(&ctx))
            .expect("expandable");
        ensure(m.operators[k] == want, format!("D̂_{} = {}", k + 1, m.operators[k]))?;
    }
    Ok("Q₀⁻¹ with √(1−4q₁) to order 8; q₁ = q̂₁/(1+q̂₁)², q₂ = q̂₂(1+q̂₁); D̂_1, D̂_2 to order 8".into())
}

/// `a − b` lies in the ideal generated by `rels` at `q = 0`.
fn congruent_mod_classical(a: &Operator<RatFunc>, b: &Operator<RatFunc>, rels: &[Operator<RatFunc>]) -> bool {
    let at_zero: Vec<_> = rels.iter().map(|p| p.map_coeffs(&2, |c| c.at_q_zero()).expect("polynomial")).collect();
    let gb = buchberger(&2, 2, &at_zero, Mode::Commutative, 10_000).expect("small");
    gb.normal_form(&a.sub(b)).expect("reduces").is_zero()
}

fn c4_endpoint(r: &PipelineResult, g: &Golden) -> Check {
    let Some(MirrorOutcome::Applied(m)) = &r.mirror else {
        return Err("no coordinate change".into());
    };
    let ctx = m.change.ctx().clone();
    for (i, rows) in [&g.mirror.h_omega1, &g.mirror.h_omega2].into_iter().enumerate() {
        if let Some(d) = first_diff(&m.connection.connection.omega[i], &to_series(&h_inv(&rat_matrix(rows)), &ctx)) {
            return Err(format!("Ω̃_{}: {d}", i + 1));
        }
    }
    if let Some(d) = first_diff(&m.gauge.q0_inverse, &to_series(&rat_matrix(&g.mirror.q0_inverse), &ctx)) {
        return Err(format!("Q̃₀⁻¹ {d}"));
    }
    for (i, rows) in [&g.mirror.omega_hat1, &g.mirror.omega_hat2].into_iter().enumerate() {
        if let Some(d) = first_diff(&m.gauge.solution.omega_hat[i], &to_series(&rat_matrix(rows), &ctx)) {
            return Err(format!("ω̂_{}: {d}", i + 1));
        }
    }
    let Some(ProductsOutcome::Series { result, .. }) = &r.products else {
        return Err("no product table".into());
    };
    let expected_alg: Vec<Operator<Series>> = g
        .mirror
        .algebra
        .iter()
        .map(|s| parse_relation(s, 2).expect("golden parses").map_coeffs(&ctx, |c| c.to_series(&ctx)).expect("expandable"))
        .collect();
    for p in &expected_alg {
        ensure(result.algebra.normal_form(p).map_err(|e| e.to_string())?.is_zero(), format!("{} not in 𝒜̂ ideal", p.fmt_symbol()))?;
    }
    let alt = buchberger(&ctx, 2, &expected_alg, Mode::Commutative, 10_000).map_err(|e| e.to_string())?;
    for p in &result.relations {
        ensure(alt.normal_form(p).map_err(|e| e.to_string())?.is_zero(), format!("{} not in stated ideal", p.fmt_symbol()))?;
    }
    let json = qdm_core::report::to_json(r);
    let cells = json["products"]["table"].as_array().ok_or("no table in report")?;
    let classical: Vec<_> = ["b1^2", "b2*(b2 - 2*b1)"].iter().map(|s| parse_relation(s, 2).expect("parses")).collect();
    for p in &g.products {
        let cell = cells
            .iter()
            .find(|c| {
                (c["left"] == p.left.as_str() && c["right"] == p.right.as_str())
                    || (c["left"] == p.right.as_str() && c["right"] == p.left.as_str())
            })
            .ok_or_else(|| format!("no cell {} ∘ {}", p.left, p.right))?;
        ensure(cell["product"] == p.report.as_str(), format!("{} ∘ {} reported as {}", p.left, p.right, cell["product"]))?;
        let i = result.table.basis.iter().position(|m| m.fmt_named("b") == p.left || (p.left == "1" && m.degree() == 0));
        let j = result.table.basis.iter().position(|m| m.fmt_named("b") == p.right || (p.right == "1" && m.degree() == 0));
        let (i, j) = (i.ok_or("unknown class")?, j.ok_or("unknown class")?);
        let got = result.table.product_class(i, j).map_coeffs(&2, |c| Ok::<_, ()>(RatFunc::from_series(c))).expect("infallible");
        let want = parse_relation(&p.expected, 2).expect("golden parses");
        ensure(congruent_mod_classical(&got, &want, &classical), format!("{} ∘ {} = {}", p.left, p.right, got.fmt_symbol()))?;
    }
    Ok("Ω̃, Q̃₀⁻¹, ω̂_1, ω̂_2 exact; 𝒜̂ ideal matches; b̂₁∘b̂₁, b̂₁∘b̂₂, b̂₂∘b̂₂ as stated".into())
}

fn c5_naive() -> Check {
    let r = run_full_pipeline(&bundled("sigma2-naive").expect("bundled"));
    let q = r.quantization.as_ref().ok_or("quantization stage did not run")?;
    ensure(q.quantized_rank == Some(0), format!("rank {:?}", q.quantized_rank))?;
    ensure(!q.valid, "accepted as a quantization")?;
    ensure(r.exit_code() == 3, format!("exit code {}", r.exit_code()))?;
    Ok("rank 0, quantization invalid, exit code 3".into())
}

/// Reduces `b^e` modulo `b_i^{n_i} = q_i` by repeated substitution.
fn monomial_oracle(e: &[u32], n: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut e = e.to_vec();
    let mut q = vec![0; e.len()];
    for i in 0..e.len() {
        while e[i] >= n[i] {
            e[i] -= n[i];
            q[i] += 1;
        }
    }
    (e, q)
}

fn q_monomial(q: &[u32]) -> RatFunc {
    let nq = q.len();
    let mut c = RatFunc::one(&nq);
    for (i, &k) in q.iter().enumerate() {
        for _ in 0..k {
            c = c.mul(&RatFunc::q_var(&nq, i));
        }
    }
    c
}

fn c6_projective() -> Check {
    let mut lines = Vec::new();
    for (name, n) in [("cp1", vec![2]), ("cp2", vec![3]), ("p1xp1", vec![2, 2])] {
        let r = run_full_pipeline(&bundled(name).expect("bundled"));
        ensure(r.failure.is_none(), format!("{name}: {:?}", r.failure))?;
        let c = r.connection.as_ref().ok_or("no connection")?;
        ensure(c.decomposition.theta_is_zero(), format!("{name}: θ ≠ 0"))?;
        let Some(Gauged::Rational(g)) = &r.gauge else {
            return Err(format!("{name}: no rational gauge"));
        };
        ensure(g.solution.is_trivial(), format!("{name}: L₊ ≠ I"))?;
        let Some(ProductsOutcome::Rational(p)) = &r.products else {
            return Err(format!("{name}: no table"));
        };
        let nq = n.len();
        let basis = &p.table.basis;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let e: Vec<u32> = a.exps().iter().zip(b.exps()).map(|(x, y)| x + y).collect();
                let (rest, q) = monomial_oracle(&e, &n);
                let k = basis.iter().position(|m| m.exps() == rest.as_slice()).ok_or("oracle left the basis")?;
                let want: Vec<RatFunc> =
                    (0..basis.len()).map(|l| if l == k { q_monomial(&q) } else { RatFunc::zero(&nq) }).collect();
                ensure(p.table.product(i, j) == want.as_slice(), format!("{name}: product ({i}, {j})"))?;
            }
        }
        if name == "cp2" {
            lines.push(format!("cp2 b∘b² = {}", p.table.product_class(1, 2).fmt_symbol()));
        }
        if name == "cp1" {
            lines.push(format!("cp1 b∘b = {}", p.table.product_class(1, 1).fmt_symbol()));
        }
    }
    Ok(format!("θ = 0, L₊ = I, tables equal the reduction oracle; {}", lines.join(", ")))
}

/// Invariants that every successful run must satisfy.
fn table_invariants<C: Coeff>(
    omega_hat: &[Matrix<C>],
    p: &ProductsResult<C>,
    q0: &Matrix<C>,
    grading: &qdm_core::coeff::Grading,
) -> Result<(), String> {
    ensure(exterior_derivative(omega_hat).iter().all(|(_, m)| m.is_zero()), "dω̂ ≠ 0")?;
    ensure(wedge(omega_hat).iter().all(|(_, m)| m.is_zero()), "ω̂∧ω̂ ≠ 0")?;
    for a in omega_hat {
        for b in omega_hat {
            ensure(a.mul(b) == b.mul(a), "ω̂_i ω̂_j ≠ ω̂_j ω̂_i")?;
        }
    }
    let basis = &p.table.basis;
    let bm = hatted_basis(q0, basis, grading).map_err(|e| e.to_string())?;
    let by_reduction = table_from_reduction(&p.algebra, &bm).map_err(|e| e.to_string())?;
    ensure(table_from_omega(omega_hat, &bm) == by_reduction, "ω̂ and reduction tables differ")?;
    let classical = classical_table(&p.relations, basis, 100_000).map_err(|e| e.to_string())?;
    ensure(p.table.at_q_zero().map_err(|e| e.to_string())? == classical, "table at q = 0 is not the cup product")?;
    Ok(())
}

fn run_invariants(r: &PipelineResult) -> Result<(), String> {
    if let Some(f) = &r.failure {
        return Err(f.to_string());
    }
    let c = r.connection.as_ref().ok_or("no connection")?;
    ensure(check_flatness(&c.connection.omega).flat, "flatness residual ≠ 0")?;
    ensure(check_degree_homogeneity(&c.connection.omega, &c.connection.blocks(), &r.problem.grading).pass, "degree")?;
    ensure(wedge(&c.decomposition.omega).iter().all(|(_, m)| m.is_zero()), "ω∧ω ≠ 0")?;
    let grading = &r.problem.grading;
    match (&r.gauge, &r.mirror, &r.products) {
        (_, Some(MirrorOutcome::Applied(m)), Some(ProductsOutcome::Series { result, .. })) => {
            let h = &m.connection.connection.omega;
            ensure(check_flatness(h).flat, "hatted flatness")?;
            let fwd: Vec<Series> = m.change.inverse.iter().map(|s| s.substitute(&m.change.forward)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            for (k, s) in fwd.iter().enumerate() {
                ensure(*s == Series::q_var(m.change.ctx(), k), "q(q̂(q)) ≠ q")?;
            }
            table_invariants(&m.gauge.solution.omega_hat, result, m.gauge.solution.q0(), grading)
        }
        (Some(Gauged::Rational(g)), _, Some(ProductsOutcome::Rational(p))) => {
            table_invariants(&g.solution.omega_hat, p, g.solution.q0(), grading)
        }
        (Some(Gauged::Series(g)), _, Some(ProductsOutcome::Series { result, .. })) => {
            table_invariants(&g.solution.omega_hat, result, g.solution.q0(), grading)
        }
        _ => Err("incomplete run".into()),
    }
}

fn term(c: i64, a: u32, d: &str, b: u32) -> String {
    let mut s = c.to_string();
    if a > 0 {
        s.push_str(&format!("*h^{a}"));
    }
    if b > 0 {
        s.push_str(&format!("*(h*{d})^{b}"));
    }
    s
}

/// `(h d)^n − q·P(h, h d)` with `P` homogeneous, so the module is graded.
fn random_operator(rng: &mut ChaCha8Rng, var: usize, commutative: bool) -> (String, i64) {
    let n: u32 = rng.random_range(2..=4);
    let half: u32 = rng.random_range(1..=n);
    let k = n - half;
    let d = format!("d{var}");
    let mut terms = Vec::new();
    for a in 0..=k {
        if commutative && a > 0 {
            continue;
        }
        let c: i64 = rng.random_range(-3..=3);
        if c != 0 {
            terms.push(term(c, a, &d, k - a));
        }
    }
    if terms.is_empty() {
        terms.push(term(1, 0, &d, k));
    }
    (format!("h^{n}*{d}^{n} - q{var}*({})", terms.join(" + ")), 2 * half as i64)
}

fn random_problem(rng: &mut ChaCha8Rng, idx: usize) -> String {
    let nvars = if idx.is_multiple_of(2) { 1 } else { 2 };
    let commutative = idx % 4 < 2;
    let (ops, degs): (Vec<String>, Vec<i64>) = (1..=nvars).map(|v| random_operator(rng, v, commutative)).unzip();
    let quoted: Vec<String> = ops.iter().map(|o| format!("\"{o}\"")).collect();
    format!("name = \"random-{idx}\"\nq_degrees = {degs:?}\noperators = [{}]\n", quoted.join(", "))
}

fn c7_properties() -> Check {
    let mut count = 0;
    for name in bundled_names() {
        let p = bundled(name).expect("bundled");
        if p.expect.is_some() {
            continue;
        }
        run_invariants(&run_full_pipeline(&p)).map_err(|e| format!("{name}: {e}"))?;
        count += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut gauged = 0;
    for idx in 0..RANDOM_INSTANCES {
        let src = random_problem(&mut rng, idx);
        let p = parse_problem(&src, &Overrides::default()).map_err(|e| format!("{src}: {e}"))?;
        let r = run_full_pipeline(&p);
        run_invariants(&r).map_err(|e| format!("{src}: {e}"))?;
        if r.connection.as_ref().is_some_and(|c| !c.decomposition.theta_is_zero()) {
            gauged += 1;
        }
    }
    let ctx = SeriesCtx::new(vec![1, 2], ORDER);
    for _ in 0..20 {
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        terms.insert(vec![0, 0], BigRational::one());
        for _ in 0..4 {
            let e = vec![rng.random_range(0..4), rng.random_range(0..3)];
            if e != [0, 0] {
                terms.insert(e, rational(rng.random_range(-5..=5)));
            }
        }
        let s = Series::from_terms(&ctx, terms.into_iter().map(|(e, c)| (e, 0, c)));
        ensure(s.mul(&s.inverse().map_err(|e| e.to_string())?) == Series::one(&ctx), "s·s⁻¹ ≠ 1")?;
        let r = s.sqrt().map_err(|e| e.to_string())?;
        ensure(r.mul(&r) == s, "√s² ≠ s")?;
    }
    Ok(format!("{count} bundled problems, {RANDOM_INSTANCES} random instances ({gauged} with θ ≠ 0); series round trips"))
}

fn c8_determinism() -> Check {
    let a = emit_report(&sigma2(), Format::Json);
    let b = emit_report(&sigma2(), Format::Json);
    ensure(a == b, "JSON reports differ")?;
    Ok(format!("two sigma2 runs give identical {}-byte JSON reports", a.len()))
}

fn main() {
    let golden = golden();
    let r = sigma2();
    let criteria: Vec<Criterion> = vec![
        ("sigma2 Gröbner basis", Box::new(|| c1_groebner(&r, &golden))),
        ("sigma2 connection", Box::new(|| c2_connection(&r, &golden))),
        ("sigma2 gauge and coordinate change", Box::new(|| c3_gauge_mirror(&r, &golden))),
        ("sigma2 Dubrovin form and products", Box::new(|| c4_endpoint(&r, &golden))),
        ("naive quantization rejected", Box::new(c5_naive)),
        ("projective-space oracle", Box::new(c6_projective)),
        ("property suite", Box::new(c7_properties)),
        ("determinism", Box::new(c8_determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {}  {name} [exact, tolerance 0]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}  {name} [exact, tolerance 0]: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
