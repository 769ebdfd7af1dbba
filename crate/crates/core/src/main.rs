use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cntsandwich::batch::{self, AnalysisConfig, Axis};
use cntsandwich::materials::MaterialLibrary;
use cntsandwich::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "cntsandwich", version, about = "Sandwich plates with nanotube-reinforced facesheets")]
struct Cli {
    /// Only print errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// Material library JSON replacing the bundled one.
    #[arg(long, global = true)]
    materials: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one analysis and write report.json, results.csv and profiles.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the Cartesian product of one or more axes over a base config.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...`; keys: a_over_h, core_to_face, v_star, temperature,
        /// theory, distribution, mesh. A value that fails in one cell becomes
        /// an error row.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Compare a pinned suite against its golden values.
    Validate {
        /// mesh-convergence, single-layer-static, sandwich-static,
        /// sandwich-thermal, modal-thermal, or `all`.
        suite: String,
        /// Also write validation.csv and validation.json here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Unknown { .. } | Error::Json(_) => EXIT_CONFIG,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot start worker pool: {e}"),
    })
}

fn library(path: Option<&Path>) -> Result<MaterialLibrary, Failure> {
    match path {
        Some(p) => MaterialLibrary::load(p).map_err(|e| Failure {
            code: EXIT_CONFIG,
            message: format!("{}: {e}", p.display()),
        }),
        None => Ok(MaterialLibrary::builtin()),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let lib = library(cli.materials.as_deref())?;
    match cli.command {
        Command::Run { config, out } => {
            let config = AnalysisConfig::load(&config)?;
            let outcome = batch::run(&config, &lib).map_err(|e| {
                let mut f = Failure::from(e);
                f.message = format!("{}: {}", config.job_id(), f.message);
                f
            })?;
            let written = batch::write_outputs(&outcome, &out)?;
            if !cli.quiet {
                for row in &outcome.report.results {
                    match row.nondim {
                        Some(n) => println!("{:<12} {:>16.9e} {:>16.9e}", row.label, row.raw, n),
                        None => println!("{:<12} {:>16.9e}", row.label, row.raw),
                    }
                }
                for p in written {
                    println!("wrote {}", p.display());
                }
            }
            Ok(())
        }
        Command::Sweep {
            config,
            axes,
            out,
            jobs,
        } => {
            let config = AnalysisConfig::load(&config)?;
            let axes = axes.iter().map(|a| a.parse()).collect::<Result<Vec<Axis>, _>>()?;
            let cells = pool(jobs)?.install(|| batch::sweep(&config, &axes, &lib))?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("results.csv");
            std::fs::write(&path, batch::sweep_csv(&axes, &cells))?;
            let failed = cells.iter().filter(|c| c.outcome.is_err()).count();
            if !cli.quiet {
                println!("{} cells, {failed} failed; wrote {}", cells.len(), path.display());
            }
            for c in cells.iter().filter(|c| c.outcome.is_err()) {
                eprintln!("cell {}: {}", c.coordinates.join(","), c.outcome.as_ref().unwrap_err());
            }
            if failed > 0 {
                return Err(Failure {
                    code: EXIT_FAILURE,
                    message: format!("{failed} sweep cells failed"),
                });
            }
            Ok(())
        }
        Command::Validate { suite, out, jobs } => {
            let names: Vec<&str> = if suite == "all" {
                batch::SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let pool = pool(jobs)?;
            let mut all_passed = true;
            for name in names {
                let report = pool.install(|| batch::validate(name, &lib))?;
                if !cli.quiet {
                    print!("{}", report.table());
                }
                if let Some(dir) = &out {
                    let dir = if suite == "all" { dir.join(name) } else { dir.clone() };
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join("validation.csv"), report.csv())?;
                    let mut json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
                    json.push('\n');
                    std::fs::write(dir.join("validation.json"), json)?;
                }
                all_passed &= report.passed();
            }
            if all_passed {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_FAILURE,
                    message: "validation failed".into(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE_LAYER: &str = r#"{
        "name": "single-layer-ud",
        "geometry": { "a": 1.0, "a_over_h": 20.0 },
        "layup": { "kind": "single" },
        "facesheet": { "cnt": "SWCNT-10-10", "matrix": "PmPV", "v_star": 0.14, "distribution": "UD" },
        "theory": "FSDT5",
        "mesh": { "nx": 8, "ny": 8 },
        "analysis": { "kind": "static", "load": { "kind": "uniform_pressure", "q0": 1.0e5 } },
        "outputs": {
            "points": [{ "label": "w_c", "quantity": "w", "at": [0.5, 0.5, 0.0] }],
            "profiles": [{ "quantity": "u", "at": [0.0, 0.5] }],
            "scaling": { "kind": "thickness_ratio" }
        }
    }"#;

    fn cli(args: &[&str]) -> Result<(), Failure> {
        let argv = std::iter::once("cntsandwich").chain(args.iter().copied()).chain(["--quiet"]);
        execute(Cli::try_parse_from(argv).unwrap())
    }

    fn code(r: Result<(), Failure>) -> u8 {
        r.err().map(|f| f.code).unwrap_or(0)
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn nondim(csv: &str, label: &str) -> f64 {
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        let col = header.iter().position(|h| *h == "nondim").unwrap();
        let line = csv.lines().find(|l| l.starts_with(&format!("{label},"))).unwrap();
        line.split(',').nth(col).unwrap().parse().unwrap()
    }

    #[test]
    fn run_writes_the_outputs_and_reproduces_the_printed_deflection() {
        let dir = tempfile::tempdir().unwrap();
        let config = write(dir.path(), "c.json", SINGLE_LAYER);
        let out = dir.path().join("out");
        assert_eq!(code(cli(&["run", &config, "--out", out.to_str().unwrap()])), 0);
        for f in ["report.json", "results.csv", "profile_u.csv"] {
            assert!(out.join(f).is_file(), "{f}");
        }
        let w = nondim(&std::fs::read_to_string(out.join("results.csv")).unwrap(), "w_c");
        assert!((w - 2.9993).abs() / 2.9993 < 0.005, "w_c = {w}");

        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        let echo = AnalysisConfig::from_json(&report["config"].to_string()).unwrap();
        assert_eq!(echo, AnalysisConfig::from_json(SINGLE_LAYER).unwrap());
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let config = write(dir.path(), "c.json", &SINGLE_LAYER.replace("\"nx\": 8, \"ny\": 8", "\"nx\": 4, \"ny\": 4"));
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        for out in [&a, &b] {
            assert_eq!(code(cli(&["run", &config, "--out", out.to_str().unwrap()])), 0);
        }
        for f in ["report.json", "results.csv", "profile_u.csv"] {
            assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn config_errors_exit_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let zero = write(dir.path(), "zero.json", &SINGLE_LAYER.replace("\"nx\": 8", "\"nx\": 0"));
        let unknown = write(dir.path(), "unknown.json", &SINGLE_LAYER.replace("\"theory\"", "\"colour\": 1, \"theory\""));
        let missing = dir.path().join("missing.json");
        let out = dir.path().join("out");
        let out = out.to_str().unwrap();
        assert_eq!(code(cli(&["run", &zero, "--out", out])), EXIT_CONFIG);
        assert_eq!(code(cli(&["run", &unknown, "--out", out])), EXIT_CONFIG);
        assert_eq!(code(cli(&["run", missing.to_str().unwrap(), "--out", out])), EXIT_CONFIG);
        assert_eq!(code(cli(&["validate", "no-such-suite"])), EXIT_CONFIG);
        let valid = write(dir.path(), "c.json", SINGLE_LAYER);
        assert_eq!(code(cli(&["sweep", &valid, "--axis", "colour=red", "--out", out])), EXIT_CONFIG);
        assert!(!dir.path().join("out").exists());
    }

    #[test]
    fn sweep_runs_the_product_and_reports_failed_cells() {
        let dir = tempfile::tempdir().unwrap();
        let config = write(dir.path(), "c.json", &SINGLE_LAYER.replace("\"nx\": 8, \"ny\": 8", "\"nx\": 2, \"ny\": 2"));
        let out = dir.path().join("grid");
        let args = ["sweep", &config, "--axis", "distribution=UD,FG-X", "--axis", "theory=FSDT5,TSDT7"];
        let mut argv = args.to_vec();
        argv.extend(["--jobs", "2", "--out", out.to_str().unwrap()]);
        assert_eq!(code(cli(&argv)), 0);
        let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().filter(|r| r.contains(",ok,w_c,")).count(), 4);

        let failing = dir.path().join("failing");
        let argv = ["sweep", &config, "--axis", "v_star=0.14,0.5", "--out", failing.to_str().unwrap()];
        assert_eq!(code(cli(&argv)), EXIT_FAILURE);
        let csv = std::fs::read_to_string(failing.join("results.csv")).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("0.5,error,")));
    }
}
