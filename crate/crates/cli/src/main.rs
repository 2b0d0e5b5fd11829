use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qdm_core::pipeline::{run_pipeline, PipelineResult, RunOptions, Stage};
use qdm_core::problem::{bundled_names, bundled_source, load_problem, parse_problem, Overrides, Problem, ProblemError};
use qdm_core::report::{emit_report, Format};

/// Quantum products from quantized D-module presentations.
#[derive(Parser)]
#[command(name = "qdm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a problem file
    Validate(Common),
    /// Gröbner basis, standard monomials and the quantization check
    Groebner(Common),
    /// Connection matrices and their flatness and degree checks
    Connect(Common),
    /// Gauge transformation to Dubrovin form
    Gauge(Common),
    /// Coordinate change read off the gauge, with one re-run if needed
    Mirror(Common),
    /// Quantum product table
    Products(Common),
    /// Every stage in order
    Pipeline(Common),
    /// List the bundled example problems
    Examples,
}

#[derive(Args)]
struct Common {
    /// Problem file, or the name of a bundled example
    problem: String,
    /// Emit canonical JSON instead of text
    #[arg(long)]
    json: bool,
    /// Series truncation order
    #[arg(long, value_name = "N")]
    truncation: Option<u32>,
    /// Coefficient mode: rational or series
    #[arg(long)]
    mode: Option<String>,
    /// Buchberger step cap (also read from QDM_STEP_CAP)
    #[arg(long, value_name = "STEPS")]
    step_cap: Option<usize>,
    /// Also report structure constants in the original coordinates
    #[arg(long)]
    pullback: bool,
}

fn load(c: &Common) -> Result<Problem, ProblemError> {
    let env_cap = std::env::var("QDM_STEP_CAP").ok().and_then(|s| s.parse().ok());
    let overrides = Overrides { mode: c.mode.clone(), truncation: c.truncation, step_cap: c.step_cap.or(env_cap) };
    let path = PathBuf::from(&c.problem);
    match bundled_source(&c.problem) {
        Some(src) if !path.exists() => parse_problem(src, &overrides),
        _ => load_problem(Path::new(&c.problem), &overrides),
    }
}

fn write_out(bytes: &[u8]) -> ExitCode {
    let mut out = std::io::stdout().lock();
    if out.write_all(bytes).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn validation_failure(e: &ProblemError, json: bool) -> ExitCode {
    if json {
        let v = serde_json::json!({
            "stages": [{ "name": "validate", "status": "failed" }],
            "failure": { "stage": "validate", "kind": "validation", "message": e.to_string(), "exit_code": 2 },
        });
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        write_out(s.as_bytes());
    }
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn products_only(r: &PipelineResult) -> Vec<u8> {
    let full = String::from_utf8(emit_report(r, Format::Human)).expect("utf-8");
    match full.find("\nproducts:\n") {
        Some(i) => full.as_bytes()[i + 1..].to_vec(),
        None => full.into_bytes(),
    }
}

fn run(c: &Common, until: Stage, products_view: bool) -> ExitCode {
    let problem = match load(c) {
        Ok(p) => p,
        Err(e) => return validation_failure(&e, c.json),
    };
    let result = run_pipeline(&problem, RunOptions { until, pullback: c.pullback });
    let bytes = if c.json {
        emit_report(&result, Format::Json)
    } else if products_view && result.failure.is_none() {
        products_only(&result)
    } else {
        emit_report(&result, Format::Human)
    };
    if write_out(&bytes) != ExitCode::SUCCESS {
        return ExitCode::from(1);
    }
    if let Some(f) = &result.failure {
        eprintln!("error: {f}");
    }
    ExitCode::from(result.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate(c) => run(c, Stage::Validate, false),
        Command::Groebner(c) => run(c, Stage::Quantization, false),
        Command::Connect(c) => run(c, Stage::Connection, false),
        Command::Gauge(c) => run(c, Stage::Gauge, false),
        Command::Mirror(c) => run(c, Stage::Mirror, false),
        Command::Products(c) => run(c, Stage::Products, true),
        Command::Pipeline(c) => run(c, Stage::Products, false),
        Command::Examples => {
            let mut s = String::new();
            for name in bundled_names() {
                s.push_str(name);
                s.push('\n');
            }
            write_out(s.as_bytes())
        }
    }
}
