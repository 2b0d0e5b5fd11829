//! Problem files.
//!
//! ```toml
//! name = "cp1"
//! variables = ["q1"]
//! q_degrees = [4]
//! operators = ["h^2*d1^2 - q1"]
//! relations = ["b1^2 - q1"]     # optional
//!
//! [options]                      # optional
//! mode = "rational"              # or "series"
//! truncation = 8
//! step_cap = 200000
//! ```

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::coeff::{Grading, RatFunc};
use crate::ore::{Operator, DEFAULT_STEP_CAP};
use crate::parse::{parse_operator, parse_relation};

pub const DEFAULT_TRUNCATION: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed problem file: {0}")]
    Syntax(String),
    #[error("invalid problem:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientMode {
    Rational,
    Series,
}

impl CoefficientMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rational" => Some(Self::Rational),
            "series" => Some(Self::Series),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rational => "rational",
            Self::Series => "series",
        }
    }
}

impl fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The file as written, before validation.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub variables: Option<Vec<String>>,
    pub q_degrees: Vec<i64>,
    pub operators: Vec<String>,
    #[serde(default)]
    pub relations: Option<Vec<String>>,
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    pub mode: Option<String>,
    pub truncation: Option<u32>,
    pub step_cap: Option<usize>,
}

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<String>,
    pub truncation: Option<u32>,
    pub step_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub mode: CoefficientMode,
    pub truncation: u32,
    pub step_cap: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub name: String,
    pub description: Option<String>,
    pub grading: Grading,
    pub operator_sources: Vec<String>,
    pub operators: Vec<Operator<RatFunc>>,
    pub relations: Option<Vec<Operator<RatFunc>>>,
    /// `Some("invalid-quantization")` for inputs that are meant to be rejected.
    pub expect: Option<String>,
    pub options: Options,
}

impl Problem {
    pub fn num_vars(&self) -> usize {
        self.grading.num_vars()
    }
}

impl ProblemSpec {
    pub fn from_toml(s: &str) -> Result<Self, ProblemError> {
        toml::from_str(s).map_err(|e| ProblemError::Syntax(e.message().to_string()))
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self, overrides: &Overrides) -> Result<Problem, ProblemError> {
        let mut errors = Vec::new();
        let r = self.q_degrees.len();
        if self.name.trim().is_empty() {
            errors.push("name is empty".to_string());
        }
        if r == 0 {
            errors.push("q_degrees is empty".to_string());
        }
        if let Some(vars) = &self.variables {
            if vars.len() != r {
                errors.push(format!("{} variables but {} q_degrees", vars.len(), r));
            }
            for (i, v) in vars.iter().enumerate() {
                if *v != format!("q{}", i + 1) {
                    errors.push(format!("variable {} must be named q{}, found '{v}'", i + 1, i + 1));
                }
            }
        }
        if self.operators.is_empty() {
            errors.push("no operators given".to_string());
        }
        let mut operators = Vec::new();
        for (i, s) in self.operators.iter().enumerate() {
            match parse_operator(s, r) {
                Ok(op) if op.is_zero() => errors.push(format!("operator {} is zero", i + 1)),
                Ok(op) => operators.push(op),
                Err(e) => errors.push(format!("operator {}: {e}", i + 1)),
            }
        }
        let relations = self.relations.as_ref().map(|rels| {
            let mut out = Vec::new();
            for (i, s) in rels.iter().enumerate() {
                match parse_relation(s, r) {
                    Ok(op) => out.push(op),
                    Err(e) => errors.push(format!("relation {}: {e}", i + 1)),
                }
            }
            out
        });
        let grading = Grading::new(self.q_degrees.clone());
        let mode_name = overrides.mode.as_ref().or(self.options.mode.as_ref());
        let mode = match mode_name {
            None if grading.all_at_least(1) => CoefficientMode::Rational,
            None => CoefficientMode::Series,
            Some(m) => CoefficientMode::parse(m).unwrap_or_else(|| {
                errors.push(format!("unknown coefficient mode '{m}' (expected rational or series)"));
                CoefficientMode::Series
            }),
        };
        if mode == CoefficientMode::Rational && !grading.all_at_least(1) {
            errors.push("rational mode requires every |q_i| >= 1".to_string());
        }
        let truncation = overrides.truncation.or(self.options.truncation).unwrap_or(DEFAULT_TRUNCATION);
        if truncation == 0 {
            errors.push("truncation order must be positive".to_string());
        }
        let step_cap = overrides.step_cap.or(self.options.step_cap).unwrap_or(DEFAULT_STEP_CAP);
        if step_cap == 0 {
            errors.push("step cap must be positive".to_string());
        }
        if let Some(e) = &self.expect {
            if e != "invalid-quantization" {
                errors.push(format!("unknown expectation '{e}'"));
            }
        }
        if !errors.is_empty() {
            return Err(ProblemError::Validation(errors));
        }
        Ok(Problem {
            name: self.name.clone(),
            description: self.description.clone(),
            grading,
            operator_sources: self.operators.clone(),
            operators,
            relations,
            expect: self.expect.clone(),
            options: Options { mode, truncation, step_cap },
        })
    }
}

pub fn parse_problem(s: &str, overrides: &Overrides) -> Result<Problem, ProblemError> {
    ProblemSpec::from_toml(s)?.validate(overrides)
}

pub fn load_problem(path: &Path, overrides: &Overrides) -> Result<Problem, ProblemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProblemError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_problem(&text, overrides)
}

const BUNDLED: &[(&str, &str)] = &[
    ("cp1", include_str!("../problems/cp1.toml")),
    ("cp2", include_str!("../problems/cp2.toml")),
    ("p1xp1", include_str!("../problems/p1xp1.toml")),
    ("sigma2", include_str!("../problems/sigma2.toml")),
    ("sigma2-naive", include_str!("../problems/sigma2-naive.toml")),
    ("fano3", include_str!("../problems/fano3.toml")),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn bundled(name: &str) -> Option<Problem> {
    bundled_source(name).map(|s| parse_problem(s, &Overrides::default()).expect("bundled problems are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_problems_validate() {
        for name in bundled_names() {
            let p = bundled(name).unwrap();
            assert_eq!(p.name, name);
        }
        assert_eq!(bundled("sigma2").unwrap().grading.q_degrees(), &[0, 4]);
        let cp1 = bundled("cp1").unwrap();
        assert_eq!(cp1.grading.q_degrees(), &[4]);
        assert_eq!(cp1.options.mode, CoefficientMode::Rational);
    }

    #[test]
    fn every_violation_is_listed() {
        let src = r#"
            name = "bad"
            variables = ["q1"]
            q_degrees = [0, 4]
            operators = ["h^2*(d1", "d3"]
            [options]
            mode = "rational"
        "#;
        let Err(ProblemError::Validation(errs)) = parse_problem(src, &Overrides::default()) else {
            panic!("expected validation failure");
        };
        assert_eq!(errs.len(), 4, "{errs:?}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let src = "name = \"x\"\nq_degrees = [4]\noperators = [\"h*d1\"]\ncolour = 3\n";
        assert!(matches!(parse_problem(src, &Overrides::default()), Err(ProblemError::Syntax(_))));
    }
}
