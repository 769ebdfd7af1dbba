//! Named validation suites: pinned configs compared against golden values
//! with per-suite tolerances, all stored as data under `data/goldens`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::config::AnalysisConfig;
use crate::batch::run::{run, RunOutcome};
use crate::error::{Error, Result};
use crate::materials::MaterialLibrary;
use crate::postprocess::format_sci;

/// Relative drift from a pinned value that still counts as reproduced.
pub const PINNED_TOLERANCE: f64 = 1e-6;

pub const SUITES: [&str; 5] = [
    "mesh-convergence",
    "single-layer-static",
    "sandwich-static",
    "sandwich-thermal",
    "modal-thermal",
];

fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "mesh-convergence" => include_str!("../../data/goldens/mesh-convergence.json"),
        "single-layer-static" => include_str!("../../data/goldens/single-layer-static.json"),
        "sandwich-static" => include_str!("../../data/goldens/sandwich-static.json"),
        "sandwich-thermal" => include_str!("../../data/goldens/sandwich-thermal.json"),
        "modal-thermal" => include_str!("../../data/goldens/modal-thermal.json"),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    #[default]
    Signed,
    /// Compare absolute values; used where the tabulated sign convention
    /// differs from the solver's.
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    /// Result row label to compare.
    pub label: String,
    /// Which printed row or column the value comes from.
    pub source: String,
    pub golden: f64,
    /// Key into the suite's tolerance table.
    pub tolerance: String,
    #[serde(default)]
    pub compare: Compare,
    /// Nondimensional value this build produced when the goldens were frozen.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub id: String,
    /// Sweep-axis overrides applied to the suite's base config.
    #[serde(default)]
    pub set: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub suite: String,
    pub description: String,
    /// Relative tolerances by name.
    pub tolerances: BTreeMap<String, f64>,
    pub base: AnalysisConfig,
    pub cases: Vec<Case>,
}

impl Suite {
    pub fn builtin(name: &str) -> Result<Self> {
        let text = builtin_text(name).ok_or_else(|| {
            Error::Config(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", ")))
        })?;
        Self::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let suite: Suite = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for case in &suite.cases {
            for check in &case.checks {
                if !suite.tolerances.contains_key(&check.tolerance) {
                    return Err(Error::Config(format!(
                        "suite {}: case {} uses unknown tolerance `{}`",
                        suite.suite, case.id, check.tolerance
                    )));
                }
            }
        }
        Ok(suite)
    }

    pub fn config(&self, case: &Case) -> Result<AnalysisConfig> {
        let mut c = self.base.clone();
        for (k, v) in &case.set {
            c.apply_axis(k, v)?;
        }
        c.name = Some(case.id.clone());
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Outside the golden tolerance.
    Fail,
    /// Within tolerance of the golden value but no longer reproducing the
    /// pinned value.
    Drift,
    /// The case did not run.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub case: String,
    pub label: String,
    pub source: String,
    pub golden: f64,
    pub ours: Option<f64>,
    /// `(ours − golden) / |golden|`.
    pub delta: Option<f64>,
    /// Nondimensional value before any magnitude comparison.
    pub signed: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: String,
    pub rows: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Pass)
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    /// Fixed-width diff table for terminals.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<34} {:<8} {:<22} {:>11} {:>11} {:>9} {:>7}  status\n",
            "case", "label", "source", "golden", "ours", "delta%", "tol%"
        );
        for r in &self.rows {
            let ours = r.ours.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
            let delta = r.delta.map(|d| format!("{:+.3}", 100.0 * d)).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<34} {:<8} {:<22} {:>11.5} {:>11} {:>9} {:>7.2}  {}{}\n",
                r.case,
                r.label,
                r.source,
                r.golden,
                ours,
                delta,
                100.0 * r.tolerance,
                status_name(r.status),
                r.message.as_deref().map(|m| format!(" ({m})")).unwrap_or_default()
            ));
        }
        out.push_str(&format!(
            "{}: {} checks, {} pass, {} fail, {} drift, {} error\n",
            self.suite,
            self.rows.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Drift),
            self.count(Status::Error)
        ));
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("case,label,source,golden,ours,delta,tolerance,status\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.case,
                r.label,
                r.source,
                format_sci(r.golden),
                r.ours.map(format_sci).unwrap_or_default(),
                r.delta.map(format_sci).unwrap_or_default(),
                format_sci(r.tolerance),
                status_name(r.status)
            ));
        }
        out
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Drift => "DRIFT",
        Status::Error => "ERROR",
    }
}

fn evaluate(suite: &Suite, case: &Case, outcome: &std::result::Result<RunOutcome, String>) -> Vec<CheckRow> {
    case.checks
        .iter()
        .map(|check| {
            let tolerance = suite.tolerances[&check.tolerance];
            let mut row = CheckRow {
                case: case.id.clone(),
                label: check.label.clone(),
                source: check.source.clone(),
                golden: check.golden,
                ours: None,
                delta: None,
                signed: None,
                tolerance,
                status: Status::Error,
                message: None,
            };
            let value = match outcome {
                Err(e) => Err(e.clone()),
                Ok(o) => o
                    .value(&check.label)
                    .ok_or_else(|| format!("no result labelled `{}`", check.label))
                    .and_then(|r| r.nondim.ok_or_else(|| format!("`{}` has no nondimensional value", check.label))),
            };
            match value {
                Err(m) => row.message = Some(m),
                Ok(v) => {
                    let ours = match check.compare {
                        Compare::Signed => v,
                        Compare::Magnitude => v.abs(),
                    };
                    let delta = (ours - check.golden) / check.golden.abs();
                    row.ours = Some(ours);
                    row.signed = Some(v);
                    row.delta = Some(delta);
                    row.status = if delta.abs() > tolerance {
                        Status::Fail
                    } else {
                        Status::Pass
                    };
                    if let Some(p) = check.pinned {
                        let drift = (v - p).abs() / p.abs().max(f64::MIN_POSITIVE);
                        if drift > PINNED_TOLERANCE {
                            row.message = Some(format!("pinned {} drifted by {drift:.2e}", format_sci(p)));
                            if row.status == Status::Pass {
                                row.status = Status::Drift;
                            }
                        }
                    }
                }
            }
            row
        })
        .collect()
}

/// Runs every case of `suite` on the current rayon pool.
pub fn validate_suite(suite: &Suite, library: &MaterialLibrary) -> ValidationReport {
    let outcomes: Vec<std::result::Result<RunOutcome, String>> = suite
        .cases
        .par_iter()
        .map(|case| {
            suite
                .config(case)
                .and_then(|c| run(&c, library))
                .map_err(|e| e.to_string())
        })
        .collect();
    let rows = suite
        .cases
        .iter()
        .zip(&outcomes)
        .flat_map(|(case, outcome)| evaluate(suite, case, outcome))
        .collect();
    ValidationReport {
        suite: suite.suite.clone(),
        rows,
    }
}

pub fn validate(name: &str, library: &MaterialLibrary) -> Result<ValidationReport> {
    Ok(validate_suite(&Suite::builtin(name)?, library))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_suites_parse_and_expand() {
        for name in SUITES {
            let suite = Suite::builtin(name).unwrap();
            assert_eq!(suite.suite, name);
            assert!(!suite.cases.is_empty());
            for case in &suite.cases {
                suite.config(case).unwrap();
            }
        }
        assert!(Suite::builtin("nope").is_err());
    }

    #[test]
    fn magnitude_and_tolerance() {
        let mut suite = Suite::builtin("mesh-convergence").unwrap();
        suite.cases.truncate(1);
        let case = &mut suite.cases[0];
        case.set.insert("mesh".into(), "2".into());
        case.checks.truncate(1);
        let lib = MaterialLibrary::builtin();
        let c = suite.config(&suite.cases[0]).unwrap();
        let v = run(&c, &lib).unwrap().value(&suite.cases[0].checks[0].label).unwrap().nondim.unwrap();
        suite.cases[0].checks[0].golden = v.abs() * 1.001;
        suite.cases[0].checks[0].pinned = Some(v);
        suite.cases[0].checks[0].compare = Compare::Magnitude;
        let report = validate_suite(&suite, &lib);
        let tol = report.rows[0].tolerance;
        assert_eq!(report.rows[0].status, if tol >= 0.001 { Status::Pass } else { Status::Fail });
        suite.cases[0].checks[0].pinned = Some(v * 1.01);
        let report = validate_suite(&suite, &lib);
        assert_ne!(report.rows[0].status, Status::Pass);
    }
}
