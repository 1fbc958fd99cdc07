//! Scenario configuration: a line-oriented `key = value` file.
//!
//! ```text
//! # comments run to the end of the line
//! model = s6
//! seed = 7
//! checks = structure, prop1, classify
//! ```
//!
//! Keys are the field names of [`ScenarioConfig`]. Missing keys take
//! model-dependent defaults; unknown or repeated keys are errors.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nkgeom_core::{CHART_TOL, STRUCTURAL_TOL};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },

    #[error("unknown model `{0}` (expected cn, cpn, cdn, s6, product or custom-chart)")]
    UnknownModel(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: String, value: String },

    #[error("missing required key `model`")]
    MissingModel,

    #[error("{0}")]
    Constraint(String),

    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Flat `C^n`.
    Cn,
    /// Complex projective space, `c > 0`.
    CPn,
    /// Complex hyperbolic space, `c < 0`.
    CDn,
    /// The round six-sphere with its octonionic structure.
    S6,
    /// `CP^1(c) × CP^{n-1}(c)`.
    Product,
    /// A seeded polynomial perturbation of the flat Hermitian structure.
    CustomChart,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Cn,
        ModelKind::CPn,
        ModelKind::CDn,
        ModelKind::S6,
        ModelKind::Product,
        ModelKind::CustomChart,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Cn => "cn",
            ModelKind::CPn => "cpn",
            ModelKind::CDn => "cdn",
            ModelKind::S6 => "s6",
            ModelKind::Product => "product",
            ModelKind::CustomChart => "custom-chart",
        }
    }

    pub fn default_n(self) -> usize {
        3
    }

    pub fn default_c(self) -> f64 {
        match self {
            ModelKind::Cn | ModelKind::CustomChart => 0.0,
            ModelKind::CPn | ModelKind::Product => 4.0,
            ModelKind::CDn => -4.0,
            ModelKind::S6 => 1.0,
        }
    }

    /// Checks whose claims hold for the model.
    pub fn default_checks(self) -> Vec<CheckKind> {
        use CheckKind::*;
        match self {
            ModelKind::Product => vec![Structure, Symmetry, Lemma, Classify],
            ModelKind::CustomChart => vec![Structure, Symmetry, Lemma, Identities, Classify],
            _ => CheckKind::ALL.to_vec(),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownModel(s.to_string()))
    }
}

/// Checks in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Structure,
    Symmetry,
    Lemma,
    Prop1,
    Identities,
    Nk,
    Schur,
    Classify,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Structure,
        CheckKind::Symmetry,
        CheckKind::Lemma,
        CheckKind::Prop1,
        CheckKind::Identities,
        CheckKind::Nk,
        CheckKind::Schur,
        CheckKind::Classify,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Structure => "structure",
            CheckKind::Symmetry => "symmetry",
            CheckKind::Lemma => "lemma",
            CheckKind::Prop1 => "prop1",
            CheckKind::Identities => "identities",
            CheckKind::Nk => "nk",
            CheckKind::Schur => "schur",
            CheckKind::Classify => "classify",
        }
    }
}

impl FromStr for CheckKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownCheck(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    pub n: usize,
    pub c: f64,
    pub tol_structural: f64,
    pub tol_chart: f64,
    pub samples: usize,
    pub refine_steps: usize,
    pub seed: u64,
    /// Sorted and deduplicated.
    pub checks: Vec<CheckKind>,
    pub report_path: Option<PathBuf>,
}

const KEYS: [&str; 10] = [
    "model",
    "n",
    "c",
    "tol_structural",
    "tol_chart",
    "samples",
    "refine_steps",
    "seed",
    "checks",
    "report_path",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

/// `all` or a comma-separated list.
pub fn parse_checks(value: &str) -> Result<Vec<CheckKind>, ConfigError> {
    let mut checks = if value.trim() == "all" {
        CheckKind::ALL.to_vec()
    } else {
        value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(CheckKind::from_str)
            .collect::<Result<Vec<_>, _>>()?
    };
    checks.sort();
    checks.dedup();
    Ok(checks)
}

impl ScenarioConfig {
    /// Defaults for `model`.
    pub fn for_model(model: ModelKind) -> Self {
        Self {
            model,
            n: model.default_n(),
            c: model.default_c(),
            tol_structural: STRUCTURAL_TOL,
            tol_chart: CHART_TOL,
            samples: 500,
            refine_steps: 50,
            seed: 0,
            checks: model.default_checks(),
            report_path: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: content.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if entries.iter().any(|(_, k, _)| *k == key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            entries.push((line, key, value));
        }

        let model = entries
            .iter()
            .find(|(_, k, _)| *k == "model")
            .ok_or(ConfigError::MissingModel)?
            .2
            .parse::<ModelKind>()?;
        let mut config = Self::for_model(model);
        for (_, key, value) in entries {
            match key {
                "model" => {}
                "n" => config.n = parse_value(key, value)?,
                "c" => config.c = parse_value(key, value)?,
                "tol_structural" => config.tol_structural = parse_value(key, value)?,
                "tol_chart" => config.tol_chart = parse_value(key, value)?,
                "samples" => config.samples = parse_value(key, value)?,
                "refine_steps" => config.refine_steps = parse_value(key, value)?,
                "seed" => config.seed = parse_value(key, value)?,
                "checks" => config.checks = parse_checks(value)?,
                "report_path" => {
                    config.report_path = (!value.is_empty()).then(|| PathBuf::from(value))
                }
                _ => unreachable!("keys were validated above"),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Constraint(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if self.checks.is_empty() {
            return fail("checks must name at least one check".into());
        }
        if self.samples < 1 {
            return fail("samples must be at least 1".into());
        }
        for (name, tol) in [
            ("tol_structural", self.tol_structural),
            ("tol_chart", self.tol_chart),
        ] {
            if !(tol > 0.0 && tol.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {tol}"));
            }
        }
        if !self.c.is_finite() {
            return fail(format!("c must be finite, got {}", self.c));
        }
        match self.model {
            ModelKind::Cn | ModelKind::CustomChart if self.c != 0.0 => fail(format!(
                "model {} takes no curvature parameter, got c = {}",
                self.model, self.c
            )),
            ModelKind::CPn | ModelKind::Product if self.c <= 0.0 => {
                fail(format!("model {} needs c > 0, got {}", self.model, self.c))
            }
            ModelKind::CDn if self.c >= 0.0 => {
                fail(format!("model cdn needs c < 0, got {}", self.c))
            }
            ModelKind::S6 if self.n != 3 || self.c != 1.0 => fail(format!(
                "model s6 is fixed at n = 3, c = 1, got n = {}, c = {}",
                self.n, self.c
            )),
            _ => Ok(()),
        }
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let checks: Vec<&str> = self.checks.iter().map(|c| c.as_str()).collect();
        let mut out = String::new();
        out.push_str(&format!("model = {}\n", self.model));
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("c = {:?}\n", self.c));
        out.push_str(&format!("tol_structural = {:e}\n", self.tol_structural));
        out.push_str(&format!("tol_chart = {:e}\n", self.tol_chart));
        out.push_str(&format!("samples = {}\n", self.samples));
        out.push_str(&format!("refine_steps = {}\n", self.refine_steps));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("checks = {}\n", checks.join(", ")));
        if let Some(path) = &self.report_path {
            out.push_str(&format!("report_path = {}\n", path.display()));
        }
        out
    }

    pub fn read(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }
}
