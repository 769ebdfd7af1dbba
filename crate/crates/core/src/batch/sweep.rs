//! Cartesian-product parameter sweeps over a base config.

use rayon::prelude::*;

use crate::batch::config::AnalysisConfig;
use crate::batch::run::{run, ResultRow};
use crate::error::{Error, Result};
use crate::materials::MaterialLibrary;
use crate::postprocess::format_sci;

/// One swept parameter and its values, parsed from `key=v1,v2,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, values) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("axis `{s}` is not of the form key=v1,v2,...")))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if key.trim().is_empty() || values.iter().any(String::is_empty) {
            return Err(Error::Config(format!("axis `{s}` has an empty key or value")));
        }
        if !AnalysisConfig::AXES.contains(&key.trim()) {
            return Err(Error::Config(format!(
                "unknown sweep axis `{}`; expected one of {}",
                key.trim(),
                AnalysisConfig::AXES.join(", ")
            )));
        }
        Ok(Axis {
            key: key.trim().to_string(),
            values,
        })
    }
}

/// The outcome of one sweep cell.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Axis values of this cell, in axis order.
    pub coordinates: Vec<String>,
    pub outcome: std::result::Result<Vec<ResultRow>, String>,
}

/// All cells of the product of `axes`, first axis varying slowest.
pub fn cells(base: &AnalysisConfig, axes: &[Axis]) -> Result<Vec<(Vec<String>, Result<AnalysisConfig>)>> {
    if axes.is_empty() {
        return Err(Error::Config("a sweep needs at least one axis".into()));
    }
    let mut out: Vec<(Vec<String>, Result<AnalysisConfig>)> = vec![(Vec::new(), Ok(base.clone()))];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.values.len());
        for (coords, config) in &out {
            for v in &axis.values {
                let mut c = coords.clone();
                c.push(v.clone());
                let cfg = match config {
                    Ok(cfg) => {
                        let mut cfg = cfg.clone();
                        cfg.apply_axis(&axis.key, v).map(|_| cfg)
                    }
                    Err(e) => Err(Error::Config(e.to_string())),
                };
                next.push((c, cfg));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Runs every cell on the current rayon pool. A failing cell becomes an error
/// row and the sweep continues.
pub fn sweep(base: &AnalysisConfig, axes: &[Axis], library: &MaterialLibrary) -> Result<Vec<Cell>> {
    let jobs = cells(base, axes)?;
    Ok(jobs
        .into_par_iter()
        .map(|(coordinates, config)| {
            let outcome = match config {
                Ok(c) => run(&c, library)
                    .map(|o| o.report.results)
                    .map_err(|e| format!("{}: {e}", c.job_id())),
                Err(e) => Err(e.to_string()),
            };
            Cell { coordinates, outcome }
        })
        .collect())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Combined CSV: axis columns, status, then the result columns.
pub fn sweep_csv(axes: &[Axis], cells: &[Cell]) -> String {
    let mut out = String::new();
    for a in axes {
        out.push_str(&csv_field(&a.key));
        out.push(',');
    }
    out.push_str("status,label,quantity,raw,nondim,message\n");
    for cell in cells {
        let prefix: String = cell.coordinates.iter().map(|c| format!("{},", csv_field(c))).collect();
        match &cell.outcome {
            Ok(rows) => {
                for r in rows {
                    out.push_str(&format!(
                        "{prefix}ok,{},{},{},{},\n",
                        csv_field(&r.label),
                        r.quantity,
                        format_sci(r.raw),
                        r.nondim.map(format_sci).unwrap_or_default()
                    ));
                }
            }
            Err(message) => out.push_str(&format!("{prefix}error,,,,,{}\n", csv_field(message))),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "geometry": { "a": 1.0, "a_over_h": 10.0 },
        "layup": { "kind": "single" },
        "facesheet": { "cnt": "SWCNT-10-10", "matrix": "PmPV", "v_star": 0.14, "distribution": "UD" },
        "theory": "FSDT5",
        "mesh": { "nx": 2, "ny": 2 },
        "analysis": { "kind": "static", "load": { "kind": "uniform_pressure", "q0": 1.0e5 } }
    }"#;

    #[test]
    fn parses_axes() {
        let a: Axis = "v_star=0.11,0.14".parse().unwrap();
        assert_eq!(a.key, "v_star");
        assert_eq!(a.values, vec!["0.11", "0.14"]);
        assert!("v_star".parse::<Axis>().is_err());
        assert!("v_star=0.1,".parse::<Axis>().is_err());
        assert!("colour=red".parse::<Axis>().is_err());
    }

    #[test]
    fn product_order_is_first_axis_slowest() {
        let base = AnalysisConfig::from_json(BASE).unwrap();
        let axes: Vec<Axis> = vec!["mesh=2,4".parse().unwrap(), "theory=FSDT5,TSDT7".parse().unwrap()];
        let c = cells(&base, &axes).unwrap();
        let coords: Vec<_> = c.iter().map(|(k, _)| k.join("/")).collect();
        assert_eq!(coords, ["2/FSDT5", "2/TSDT7", "4/FSDT5", "4/TSDT7"]);
    }

    #[test]
    fn failing_cells_become_error_rows() {
        let base = AnalysisConfig::from_json(BASE).unwrap();
        let axes: Vec<Axis> = vec!["v_star=0.14,0.5".parse().unwrap()];
        let lib = MaterialLibrary::builtin();
        let cells = sweep(&base, &axes, &lib).unwrap();
        assert_eq!(cells.len(), 2);
        assert!(cells[0].outcome.is_ok());
        assert!(cells[1].outcome.is_err());
        let csv = sweep_csv(&axes, &cells);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "v_star,status,label,quantity,raw,nondim,message");
        assert!(lines[1].starts_with("0.14,ok,w_c,w,"));
        assert!(lines[2].starts_with("0.5,error,,,,,"));
    }
}
