use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::ScenarioConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub defect: f64,
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, defect: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            defect,
            tolerance,
        }
    }

    /// A check that could not be evaluated.
    pub fn error(id: impl Into<String>, tolerance: f64) -> Self {
        Self::new(id, f64::INFINITY, tolerance)
    }

    /// NaN defects fail.
    pub fn status(&self) -> Status {
        if self.defect <= self.tolerance {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn defect_text(&self) -> String {
        format!("{:.16e}", self.defect)
    }

    pub fn tolerance_text(&self) -> String {
        format!("{:e}", self.tolerance)
    }

    pub fn line(&self) -> String {
        format!(
            "CHECK {} {} defect={} tol={}",
            self.id,
            self.status().as_str(),
            self.defect_text(),
            self.tolerance_text()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<CheckRecord>,
    pub config: ScenarioConfig,
    pub version: &'static str,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    id: &'a str,
    status: Status,
    defect: String,
    tol: String,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    version: &'a str,
    seed: u64,
    config: String,
    records: Vec<JsonRecord<'a>>,
    pass: usize,
    fail: usize,
}

#[derive(Debug, Error)]
#[error("cannot write report {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

impl Report {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn pass_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status() == Status::Pass)
            .count()
    }

    pub fn fail_count(&self) -> usize {
        self.records.len() - self.pass_count()
    }

    pub fn all_pass(&self) -> bool {
        self.fail_count() == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            writeln!(out, "{}", record.line()).unwrap();
        }
        writeln!(
            out,
            "SUMMARY pass={} fail={} seed={}",
            self.pass_count(),
            self.fail_count(),
            self.seed()
        )
        .unwrap();
        out
    }

    /// Mirror of the text report plus the config echo and version.
    /// Defects are kept as the exact text of the line format, which also
    /// covers infinite defects.
    pub fn to_json(&self) -> String {
        let json = JsonReport {
            version: self.version,
            seed: self.seed(),
            config: self.config.to_text(),
            records: self
                .records
                .iter()
                .map(|r| JsonRecord {
                    id: &r.id,
                    status: r.status(),
                    defect: r.defect_text(),
                    tol: r.tolerance_text(),
                })
                .collect(),
            pass: self.pass_count(),
            fail: self.fail_count(),
        };
        let mut text = serde_json::to_string_pretty(&json).expect("report serialises");
        text.push('\n');
        text
    }

    /// Writes `path` and its JSON mirror `path.json`.
    pub fn write(&self, path: &Path) -> Result<(), WriteError> {
        let write = |p: &Path, text: String| {
            std::fs::write(p, text).map_err(|source| WriteError {
                path: p.to_path_buf(),
                source,
            })
        };
        write(path, self.to_text())?;
        write(&json_path(path), self.to_json())
    }
}

pub fn json_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

pub const SCHEMA: &str = "\
Text report, one line per check in a fixed order:
  CHECK <id> <PASS|FAIL> defect=<17 significant digits> tol=<decimal>
  SUMMARY pass=<k> fail=<m> seed=<seed>
A check passes iff defect <= tol. A check that cannot be evaluated is
reported with defect=inf.

JSON mirror, written next to the text report as <report_path>.json:
  { \"version\": string, \"seed\": integer, \"config\": string,
    \"records\": [ { \"id\": string, \"status\": \"PASS\"|\"FAIL\",
                   \"defect\": string, \"tol\": string } ],
    \"pass\": integer, \"fail\": integer }
\"config\" is the scenario in config-file syntax and parses back to the
same scenario.

Config file, one `key = value` per line, `#` starts a comment:
  model           cn | cpn | cdn | s6 | product | custom-chart  (required)
  n               complex dimension, >= 2
  c               holomorphic sectional curvature of the space form
  tol_structural  tolerance for exact algebraic identities
  tol_chart       tolerance for chart numerics
  samples         random planes per range estimate, >= 1
  refine_steps    refinement sweeps per range estimate
  seed            unsigned integer
  checks          all | comma list of structure, symmetry, lemma, prop1,
                  identities, nk, schur, classify
  report_path     where to write the report

Exit status: 0 all checks pass, 1 a check failed, 2 configuration or usage error.
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelKind;

    fn report(records: Vec<CheckRecord>) -> Report {
        Report {
            records,
            config: ScenarioConfig::for_model(ModelKind::S6),
            version: VERSION,
        }
    }

    #[test]
    fn line_format_is_exact() {
        let r = CheckRecord::new("prop1.reconstruction", 1.25e-15, 1e-9);
        assert_eq!(
            r.line(),
            "CHECK prop1.reconstruction PASS defect=1.2500000000000000e-15 tol=1e-9"
        );
        let r = CheckRecord::new("classify.label", 1.0, 0.0);
        assert_eq!(
            r.line(),
            "CHECK classify.label FAIL defect=1.0000000000000000e0 tol=0e0"
        );
    }

    #[test]
    fn errors_and_nan_fail() {
        assert_eq!(
            CheckRecord::error("schur.error", 1.0).status(),
            Status::Fail
        );
        assert_eq!(CheckRecord::new("x", f64::NAN, 1.0).status(), Status::Fail);
        assert_eq!(CheckRecord::new("x", 1.0, 1.0).status(), Status::Pass);
    }

    #[test]
    fn summary_counts_records() {
        let rep = report(vec![
            CheckRecord::new("a", 0.0, 1.0),
            CheckRecord::new("b", 2.0, 1.0),
            CheckRecord::error("c", 1.0),
        ]);
        let text = rep.to_text();
        assert!(text.ends_with("SUMMARY pass=1 fail=2 seed=0\n"));
        assert_eq!(text.lines().count(), 4);
        assert!(!rep.all_pass());
    }

    #[test]
    fn json_mirrors_the_text() {
        let rep = report(vec![
            CheckRecord::new("a", 0.5, 1.0),
            CheckRecord::error("b", 1.0),
        ]);
        let value: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(value["records"][0]["status"], "PASS");
        assert_eq!(value["records"][1]["defect"], "inf");
        assert_eq!(value["fail"], 1);
        let echoed = ScenarioConfig::parse(value["config"].as_str().unwrap()).unwrap();
        assert_eq!(echoed, rep.config);
    }

    #[test]
    fn json_path_appends_suffix() {
        assert_eq!(
            json_path(Path::new("out/r.txt")),
            PathBuf::from("out/r.txt.json")
        );
    }
}
