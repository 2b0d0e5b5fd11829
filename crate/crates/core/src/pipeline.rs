//! Stage orchestration: Gröbner basis, quantization check, connection,
//! gauge, optional coordinate change with one re-run, products.

use std::fmt;
use std::time::{Duration, Instant};

use crate::coeff::{Coeff, Grading, RatFunc, ScalarError, Series, SeriesCtx};
use crate::connection::{
    check_degree_homogeneity, check_flatness, connection_matrices, h_decompose, wedge, all_zero, Connection,
    ConnectionError, HDecomposition, HomogeneityReport,
};
use crate::gauge::{
    check_block_profile, solve_gauge_rational, solve_gauge_series, verify_dubrovin_form, DubrovinReport, GaugeError,
    GaugeSolution, ProfileReport,
};
use crate::matrix::Matrix;
use crate::mirror::{check_hypotheses, extract_jacobian_block, integrate_coordinates, transform_operators, CoordinateChange, MirrorError};
use crate::ore::{buchberger, check_quantization, GroebnerBasis, GroebnerError, Mode, Operator, QuantizationReport};
use crate::problem::{CoefficientMode, Problem};
use crate::products::{pull_back, structure_constants, ProductTable, ProductsError, ProductsResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Validate,
    Groebner,
    Quantization,
    Connection,
    Gauge,
    Mirror,
    Products,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Validate,
        Stage::Groebner,
        Stage::Quantization,
        Stage::Connection,
        Stage::Gauge,
        Stage::Mirror,
        Stage::Products,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::Groebner => "groebner",
            Stage::Quantization => "quantization",
            Stage::Connection => "connection",
            Stage::Gauge => "gauge",
            Stage::Mirror => "mirror",
            Stage::Products => "products",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    Validation,
    /// A flatness, homogeneity, quantization or other mathematical check failed.
    Math,
    Resource,
    Internal,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Validation => 2,
            FailureKind::Math => 3,
            FailureKind::Resource => 4,
            FailureKind::Internal => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FailureKind::Validation => "validation",
            FailureKind::Math => "math",
            FailureKind::Resource => "resource",
            FailureKind::Internal => "internal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: Stage,
    pub kind: FailureKind,
    pub message: String,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed ({}): {}", self.stage, self.kind.name(), self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageStatus {
    Ok,
    Skipped(String),
    Failed,
}

#[derive(Clone, Debug)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct ConnectionArtifacts<C: Coeff> {
    pub connection: Connection<C>,
    pub decomposition: HDecomposition<C>,
    pub flat: bool,
    /// `ω ∧ ω = 0` for the `1/h` part.
    pub wedge_zero: bool,
    pub homogeneity: HomogeneityReport,
}

#[derive(Clone, Debug)]
pub struct GaugeArtifacts<C: Coeff> {
    pub solution: GaugeSolution<C>,
    pub q0_inverse: Matrix<C>,
    pub profile: ProfileReport,
    pub dubrovin: DubrovinReport,
}

#[derive(Clone, Debug)]
pub enum Gauged {
    Rational(GaugeArtifacts<RatFunc>),
    Series(GaugeArtifacts<Series>),
}

#[derive(Clone, Debug)]
pub enum MirrorOutcome {
    /// Every `|q_i| >= 1`, so `T = I` for degree reasons.
    NotNeeded,
    Identity,
    Applied(Box<MirrorArtifacts>),
}

#[derive(Clone, Debug)]
pub struct MirrorArtifacts {
    pub change: CoordinateChange,
    pub operators: Vec<Operator<Series>>,
    pub groebner: GroebnerBasis<Series>,
    pub connection: ConnectionArtifacts<Series>,
    pub gauge: GaugeArtifacts<Series>,
}

#[derive(Clone, Debug)]
pub enum ProductsOutcome {
    Rational(ProductsResult<RatFunc>),
    Series { result: ProductsResult<Series>, pullback: Option<ProductTable<Series>> },
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub problem: Problem,
    pub stages: Vec<StageRecord>,
    pub failure: Option<StageFailure>,
    pub groebner: Option<GroebnerBasis<RatFunc>>,
    pub quantization: Option<QuantizationReport<RatFunc>>,
    pub connection: Option<ConnectionArtifacts<RatFunc>>,
    pub gauge: Option<Gauged>,
    pub mirror: Option<MirrorOutcome>,
    pub products: Option<ProductsOutcome>,
}

impl PipelineResult {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, |f| f.kind.exit_code())
    }

    pub fn stage(&self, s: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|r| r.stage == s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Last stage to run.
    pub until: Stage,
    /// Also report structure constants in the original coordinates.
    pub pullback: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { until: Stage::Products, pullback: false }
    }
}

fn groebner_failure(e: GroebnerError) -> (FailureKind, String) {
    let kind = match e {
        GroebnerError::ResourceLimit(_) => FailureKind::Resource,
        _ => FailureKind::Math,
    };
    (kind, e.to_string())
}

fn math(e: impl fmt::Display) -> (FailureKind, String) {
    (FailureKind::Math, e.to_string())
}

fn connection_failure(e: ConnectionError) -> (FailureKind, String) {
    match e {
        ConnectionError::Groebner(g) => groebner_failure(g),
        other => math(other),
    }
}

fn products_failure(e: ProductsError) -> (FailureKind, String) {
    match e {
        ProductsError::Groebner(g) => groebner_failure(g),
        other => math(other),
    }
}

type StageResult<T> = Result<T, (FailureKind, String)>;

/// Connection matrices with flatness, `ω ∧ ω` and degree checks.
fn connect<C: Coeff>(gb: &GroebnerBasis<C>, grading: &Grading) -> StageResult<ConnectionArtifacts<C>> {
    let connection = connection_matrices(gb).map_err(connection_failure)?;
    let decomposition = h_decompose(&connection.omega).map_err(connection_failure)?;
    let flat = check_flatness(&connection.omega).flat;
    let wedge_zero = all_zero(&wedge(&decomposition.omega));
    let homogeneity = check_degree_homogeneity(&connection.omega, &connection.blocks(), grading);
    let art = ConnectionArtifacts { connection, decomposition, flat, wedge_zero, homogeneity };
    if !art.flat {
        return Err((FailureKind::Math, "connection is not flat".into()));
    }
    if !art.wedge_zero {
        return Err((FailureKind::Math, "ω ∧ ω does not vanish".into()));
    }
    if !art.homogeneity.pass {
        let d = &art.homogeneity.defects[0];
        return Err((
            FailureKind::Math,
            format!(
                "entry ({}, {}) of Ω_{} is not homogeneous of degree {} ({} defects)",
                d.row,
                d.col,
                d.var + 1,
                d.expected,
                art.homogeneity.defects.len()
            ),
        ));
    }
    Ok(art)
}

fn gauge_artifacts<C: Coeff>(
    solution: GaugeSolution<C>,
    blocks: &[usize],
    grading: &Grading,
) -> StageResult<GaugeArtifacts<C>> {
    let ctx = solution.q0().ctx().clone();
    let h_inv = C::h_pow(&ctx, -1);
    let full: Vec<Matrix<C>> = solution.omega_hat.iter().map(|w| w.scale(&h_inv)).collect();
    let dubrovin = verify_dubrovin_form(&full).map_err(math)?;
    let profile = check_block_profile(&solution, blocks, grading);
    let q0_inverse = solution.q0().inverse().map_err(math)?;
    if !dubrovin.pass {
        return Err((FailureKind::Math, format!("gauged connection is not in Dubrovin form: {dubrovin:?}")));
    }
    if !profile.pass {
        let detail = profile.violations.first().cloned().unwrap_or_else(|| "inhomogeneous entries".into());
        return Err((FailureKind::Math, format!("L₊ violates the expected block profile: {detail}")));
    }
    Ok(GaugeArtifacts { solution, q0_inverse, profile, dubrovin })
}

fn trivial_solution<C: Coeff>(omega: &[Matrix<C>]) -> GaugeSolution<C> {
    let n = omega[0].rows();
    GaugeSolution { l_plus: vec![Matrix::identity(omega[0].ctx(), n)], q: Vec::new(), omega_hat: omega.to_vec() }
}

fn series_ctx(problem: &Problem) -> SeriesCtx {
    SeriesCtx::for_grading(&problem.grading, problem.options.truncation)
}

fn gauge_series(hd: &HDecomposition<Series>, blocks: &[usize], grading: &Grading) -> StageResult<GaugeArtifacts<Series>> {
    let sol = if hd.theta_is_zero() {
        trivial_solution(&hd.omega)
    } else {
        solve_gauge_series(hd, blocks, grading).map_err(|e: GaugeError| math(e))?
    };
    gauge_artifacts(sol, blocks, grading)
}

struct Runner {
    result: PipelineResult,
    opts: RunOptions,
}

impl Runner {
    fn wants(&self, s: Stage) -> bool {
        self.result.failure.is_none() && s <= self.opts.until
    }

    fn record(&mut self, stage: Stage, started: Instant, outcome: StageResult<StageStatus>) {
        let elapsed = started.elapsed();
        let status = match outcome {
            Ok(s) => s,
            Err((kind, message)) => {
                self.result.failure = Some(StageFailure { stage, kind, message });
                StageStatus::Failed
            }
        };
        self.result.stages.push(StageRecord { stage, status, elapsed });
    }

    fn run(mut self) -> PipelineResult {
        let problem = self.result.problem.clone();
        let r = problem.num_vars();
        let cap = problem.options.step_cap;
        let grading = problem.grading.clone();
        self.record(Stage::Validate, Instant::now(), Ok(StageStatus::Ok));

        if self.wants(Stage::Groebner) {
            let t = Instant::now();
            let out = buchberger(&r, r, &problem.operators, Mode::Ore, cap).map_err(groebner_failure);
            let status = out.map(|gb| {
                self.result.groebner = Some(gb);
                StageStatus::Ok
            });
            self.record(Stage::Groebner, t, status);
        }

        if self.wants(Stage::Quantization) {
            let t = Instant::now();
            let gb = self.result.groebner.as_ref().expect("groebner ran");
            let out = check_quantization(gb, &problem.operators, problem.relations.as_deref(), cap)
                .map_err(groebner_failure)
                .and_then(|rep| {
                    let verdict = if rep.valid {
                        Ok(StageStatus::Ok)
                    } else {
                        Err((FailureKind::Math, format!("not a valid quantization: {}", rep.failures.join("; "))))
                    };
                    self.result.quantization = Some(rep);
                    verdict
                });
            self.record(Stage::Quantization, t, out);
        }

        if self.wants(Stage::Connection) {
            let t = Instant::now();
            let gb = self.result.groebner.as_ref().expect("groebner ran");
            let out = connect(gb, &grading).map(|art| {
                self.result.connection = Some(art);
                StageStatus::Ok
            });
            self.record(Stage::Connection, t, out);
        }

        if self.wants(Stage::Gauge) {
            let t = Instant::now();
            let conn = self.result.connection.as_ref().expect("connection ran");
            let blocks = conn.connection.blocks();
            let hd = &conn.decomposition;
            let skipped = hd.theta_is_zero();
            let out = match problem.options.mode {
                CoefficientMode::Rational => {
                    let sol = if skipped {
                        Ok(trivial_solution(&hd.omega))
                    } else {
                        solve_gauge_rational(hd, &blocks, &grading).map_err(math)
                    };
                    sol.and_then(|s| gauge_artifacts(s, &blocks, &grading)).map(Gauged::Rational)
                }
                CoefficientMode::Series => {
                    let ctx = series_ctx(&problem);
                    hd.map(&ctx, |c: &RatFunc| c.to_series(&ctx))
                        .map_err(math)
                        .and_then(|hs| gauge_series(&hs, &blocks, &grading))
                        .map(Gauged::Series)
                }
            };
            let out = out.map(|g| {
                self.result.gauge = Some(g);
                if skipped {
                    StageStatus::Skipped("θ = 0, connection already in Dubrovin form".into())
                } else {
                    StageStatus::Ok
                }
            });
            self.record(Stage::Gauge, t, out);
        }

        if self.wants(Stage::Mirror) {
            let t = Instant::now();
            let out = self.mirror_stage(&problem);
            let out = out.map(|m| {
                let status = match &m {
                    MirrorOutcome::NotNeeded => StageStatus::Skipped("all |q_i| >= 1, no coordinate change".into()),
                    MirrorOutcome::Identity => StageStatus::Skipped("Jacobian block is the identity".into()),
                    MirrorOutcome::Applied(_) => StageStatus::Ok,
                };
                self.result.mirror = Some(m);
                status
            });
            self.record(Stage::Mirror, t, out);
        }

        if self.wants(Stage::Products) {
            let t = Instant::now();
            let out = self.products_stage(&problem).map(|p| {
                self.result.products = Some(p);
                StageStatus::Ok
            });
            self.record(Stage::Products, t, out);
        }
        self.result
    }

    fn mirror_stage(&self, problem: &Problem) -> StageResult<MirrorOutcome> {
        let grading = &problem.grading;
        if grading.all_at_least(1) {
            return Ok(MirrorOutcome::NotNeeded);
        }
        let conn = self.result.connection.as_ref().expect("connection ran");
        let gb = self.result.groebner.as_ref().expect("groebner ran");
        let basis = &conn.connection.basis;
        let Some(Gauged::Series(g)) = &self.result.gauge else {
            return Err((FailureKind::Math, "a coordinate change needs series mode".into()));
        };
        let mirr = |e: MirrorError| math(e);
        check_hypotheses(grading, conn.decomposition.p(), gb).map_err(mirr)?;
        let t = extract_jacobian_block(g.solution.q0(), basis).map_err(mirr)?;
        if t.is_identity() {
            return Ok(MirrorOutcome::Identity);
        }
        let change = integrate_coordinates(&t).map_err(mirr)?;
        let operators = transform_operators(&problem.operators, &change).map_err(mirr)?;
        let ctx = change.ctx().clone();
        let r = problem.num_vars();
        let hgb = buchberger(&ctx, r, &operators, Mode::Ore, problem.options.step_cap).map_err(groebner_failure)?;
        let hconn = connect(&hgb, grading)?;
        if hconn.connection.rank() != conn.connection.rank() {
            return Err((
                FailureKind::Math,
                format!("transformed module has rank {}, expected {}", hconn.connection.rank(), conn.connection.rank()),
            ));
        }
        let hgauge = gauge_series(&hconn.decomposition, &hconn.connection.blocks(), grading)?;
        let t2 = extract_jacobian_block(hgauge.solution.q0(), &hconn.connection.basis).map_err(mirr)?;
        if !t2.is_identity() {
            return Err((FailureKind::Math, "a second coordinate change would be required".into()));
        }
        Ok(MirrorOutcome::Applied(Box::new(MirrorArtifacts {
            change,
            operators,
            groebner: hgb,
            connection: hconn,
            gauge: hgauge,
        })))
    }

    fn products_stage(&self, problem: &Problem) -> StageResult<ProductsOutcome> {
        let grading = &problem.grading;
        let cap = problem.options.step_cap;
        let conn = self.result.connection.as_ref().expect("connection ran");
        if let Some(MirrorOutcome::Applied(m)) = &self.result.mirror {
            let g = &m.gauge.solution;
            let result =
                structure_constants(&m.operators, g.q0(), &g.omega_hat, &m.connection.connection.basis, grading, cap)
                    .map_err(products_failure)?;
            let pullback = if self.opts.pullback {
                Some(pull_back(&result.table, &m.change.forward).map_err(math)?)
            } else {
                None
            };
            return Ok(ProductsOutcome::Series { result, pullback });
        }
        let basis = &conn.connection.basis;
        match self.result.gauge.as_ref().expect("gauge ran") {
            Gauged::Rational(g) => {
                let s = &g.solution;
                structure_constants(&problem.operators, s.q0(), &s.omega_hat, basis, grading, cap)
                    .map(ProductsOutcome::Rational)
                    .map_err(products_failure)
            }
            Gauged::Series(g) => {
                let ctx = series_ctx(problem);
                let ops = problem
                    .operators
                    .iter()
                    .map(|op| op.map_coeffs(&ctx, |c| c.to_series(&ctx)))
                    .collect::<Result<Vec<_>, ScalarError>>()
                    .map_err(math)?;
                let s = &g.solution;
                structure_constants(&ops, s.q0(), &s.omega_hat, basis, grading, cap)
                    .map(|result| ProductsOutcome::Series { result, pullback: None })
                    .map_err(products_failure)
            }
        }
    }
}

/// Runs the stages in order up to `opts.until`, stopping at the first failure.
pub fn run_pipeline(problem: &Problem, opts: RunOptions) -> PipelineResult {
    let result = PipelineResult {
        problem: problem.clone(),
        stages: Vec::new(),
        failure: None,
        groebner: None,
        quantization: None,
        connection: None,
        gauge: None,
        mirror: None,
        products: None,
    };
    Runner { result, opts }.run()
}

pub fn run_full_pipeline(problem: &Problem) -> PipelineResult {
    run_pipeline(problem, RunOptions::default())
}

fn gauge_consistent<C: Coeff>(g: &GaugeArtifacts<C>, omega: &[Matrix<C>]) -> bool {
    crate::gauge::defining_residual(&g.solution, omega).iter().all(Matrix::is_zero)
}

/// Re-checks the reconstruction identities between stored artifacts:
/// `Ω = ω/h + Σ h^k θ^(k)` and the gauge equation for `L₊`.
pub fn verify_consistency(r: &PipelineResult) -> Vec<String> {
    let mut problems = Vec::new();
    let Some(conn) = &r.connection else {
        return problems;
    };
    if conn.decomposition.reconstruct() != conn.connection.omega {
        problems.push("h-decomposition does not reconstruct Ω".into());
    }
    match &r.gauge {
        Some(Gauged::Rational(g)) if !gauge_consistent(g, &conn.connection.omega) => {
            problems.push("L₊ does not satisfy the gauge equation".into());
        }
        Some(Gauged::Series(g)) => {
            let ctx = g.solution.q0().ctx().clone();
            let ok = conn
                .connection
                .omega
                .iter()
                .map(|m| m.try_map(&ctx, |c| c.to_series(&ctx)))
                .collect::<Result<Vec<_>, _>>()
                .is_ok_and(|om| gauge_consistent(g, &om));
            if !ok {
                problems.push("L₊ does not satisfy the gauge equation".into());
            }
        }
        _ => {}
    }
    if let Some(MirrorOutcome::Applied(m)) = &r.mirror {
        if !gauge_consistent(&m.gauge, &m.connection.connection.omega) {
            problems.push("hatted L₊ does not satisfy the gauge equation".into());
        }
    }
    problems
}
