//! One analysis from a config: pipeline, result rows and output files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{Diagnostics, Model};
use crate::batch::config::{AnalysisConfig, AnalysisSpec, Dimensions, LayupSpec, ScalingSpec, REFERENCE_TEMPERATURE};
use crate::error::{Error, Result};
use crate::layup::Side;
use crate::materials::MaterialLibrary;
use crate::postprocess::profile::write_profile_csv;
use crate::postprocess::{
    format_sci, thickness_profile, NondimScheme, ProfileQuantity, ProfileRow, Quantity, ResultField,
};
use crate::solvers::EigenOptions;

/// One reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub label: String,
    /// Profile quantity name, or `omega` for circular frequencies.
    pub quantity: String,
    /// Physical coordinates in metres; absent for frequencies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    pub raw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nondim: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub num_equations: usize,
    pub num_constrained: usize,
    pub thickness_panels: usize,
    pub residual: f64,
    pub iterations: usize,
    /// Largest eigen-residual per mode for modal runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mode_residuals: Vec<f64>,
}

impl DiagnosticsReport {
    fn new(d: &Diagnostics, mode_residuals: Vec<f64>) -> Self {
        Self {
            num_equations: d.num_equations,
            num_constrained: d.num_constrained,
            thickness_panels: d.thickness_panels,
            residual: d.residual,
            iterations: d.iterations,
            mode_residuals,
        }
    }
}

/// A sampled through-thickness profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileOutput {
    pub quantity: ProfileQuantity,
    pub at: [f64; 2],
    pub rows: Vec<ProfileRow>,
    /// Divisor applied for the nondimensional column (1 when unscaled).
    pub scale: f64,
    pub scaling: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: AnalysisConfig,
    pub diagnostics: DiagnosticsReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<NondimScheme>,
    pub results: Vec<ResultRow>,
    /// File names of the written profiles.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<String>,
}

/// In-memory result of [`run`]; `report` is what `report.json` holds.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub profiles: Vec<ProfileOutput>,
}

impl RunOutcome {
    /// The row labelled `label`.
    pub fn value(&self, label: &str) -> Option<&ResultRow> {
        self.report.results.iter().find(|r| r.label == label)
    }
}

fn quantity_kind(q: ProfileQuantity) -> Quantity {
    match q {
        ProfileQuantity::U | ProfileQuantity::V => Quantity::InPlane,
        ProfileQuantity::W => Quantity::Deflection,
        ProfileQuantity::Sxx | ProfileQuantity::Syy | ProfileQuantity::Sxy => Quantity::NormalStress,
        ProfileQuantity::Sxz | ProfileQuantity::Syz => Quantity::ShearStress,
    }
}

fn scaling_name(spec: &ScalingSpec) -> &'static str {
    match spec {
        ScalingSpec::Mechanical { .. } => "mechanical",
        ScalingSpec::Thermal { .. } => "thermal",
        ScalingSpec::ThicknessRatio => "thickness_ratio",
        ScalingSpec::Frequency { .. } => "frequency",
    }
}

fn nondim_scheme(config: &AnalysisConfig, library: &MaterialLibrary, dims: Dimensions) -> Result<Option<NondimScheme>> {
    let Some(spec) = &config.outputs.scaling else {
        return Ok(None);
    };
    let reference = |name: &Option<String>| -> Result<_> {
        let core_name = match (name, &config.layup) {
            (Some(n), _) => n.as_str(),
            (None, LayupSpec::Sandwich { core, .. }) => core.as_str(),
            (None, LayupSpec::Single) => {
                return Err(Error::Config(
                    "scaling needs `reference_core` for a single-layer plate".into(),
                ))
            }
        };
        let core = library.core(core_name)?;
        Ok((
            core.modulus_at(REFERENCE_TEMPERATURE)?,
            core.alpha.eval(REFERENCE_TEMPERATURE),
            core.rho,
        ))
    };
    let s = dims.a / dims.h;
    let amplitude = match config.analysis {
        AnalysisSpec::Static { load, .. } => Some((load.amplitude(), load.is_thermal())),
        AnalysisSpec::Modal { .. } => None,
    };
    let mismatch = |what: &str| Error::Config(format!("{what} scaling does not fit this analysis"));
    let scheme = match spec {
        ScalingSpec::Mechanical { scale, reference_core } => {
            let (modulus, _, _) = reference(reference_core)?;
            match amplitude {
                Some((q0, false)) => NondimScheme::Mechanical {
                    q0,
                    modulus,
                    h: dims.h,
                    s,
                    scale: *scale,
                },
                _ => return Err(mismatch("mechanical")),
            }
        }
        ScalingSpec::Thermal {
            deflection,
            reference_core,
        } => {
            let (modulus, alpha, _) = reference(reference_core)?;
            match amplitude {
                Some((t0, true)) => NondimScheme::Thermal {
                    t0,
                    modulus,
                    alpha,
                    h: dims.h,
                    s,
                    deflection: *deflection,
                },
                _ => return Err(mismatch("thermal")),
            }
        }
        ScalingSpec::ThicknessRatio => match amplitude {
            Some(_) => NondimScheme::ThicknessRatio { h: dims.h },
            None => return Err(mismatch("thickness-ratio")),
        },
        ScalingSpec::Frequency { reference_core } => {
            let (modulus, _, density) = reference(reference_core)?;
            match amplitude {
                None => NondimScheme::Frequency {
                    a: dims.a,
                    h: dims.h,
                    density,
                    modulus,
                },
                Some(_) => return Err(mismatch("frequency")),
            }
        }
    };
    Ok(Some(scheme))
}

fn sample(field: &ResultField, q: ProfileQuantity, x: f64, y: f64, z: f64, side: Option<Side>) -> Result<f64> {
    Ok(match q {
        ProfileQuantity::U => field.displacement_at(x, y, z, side)?[0],
        ProfileQuantity::V => field.displacement_at(x, y, z, side)?[1],
        ProfileQuantity::W => field.displacement_at(x, y, z, side)?[2],
        ProfileQuantity::Sxx => field.in_plane_stress_at(x, y, z, side)?[0],
        ProfileQuantity::Syy => field.in_plane_stress_at(x, y, z, side)?[1],
        ProfileQuantity::Sxy => field.in_plane_stress_at(x, y, z, side)?[2],
        ProfileQuantity::Sxz => field.transverse_shear(x, y)?.at(z)?[0],
        ProfileQuantity::Syz => field.transverse_shear(x, y)?.at(z)?[1],
    })
}

/// Runs the full pipeline for `config` without touching the file system.
pub fn run(config: &AnalysisConfig, library: &MaterialLibrary) -> Result<RunOutcome> {
    config.validate()?;
    let dims = config.geometry.resolve()?;
    let scheme = nondim_scheme(config, library, dims)?;
    let model = Model::new(
        config.build_mesh()?,
        config.build_layup(library)?,
        config.theory,
        config.section_options(),
    )?;
    let scale_of = |q: Quantity| -> Result<Option<f64>> { scheme.map(|s| s.factor(q)).transpose() };

    let (field, diagnostics, mut results) = match config.analysis {
        AnalysisSpec::Static { load, thermal_stress } => {
            let solution = model.solve_static(&load)?;
            let field = solution.field.with_thermal_stress(thermal_stress);
            (field, DiagnosticsReport::new(&solution.diagnostics, Vec::new()), Vec::new())
        }
        AnalysisSpec::Modal { modes } => {
            let mut solution = model.solve_modes(modes, &EigenOptions::default())?;
            let scale = scale_of(Quantity::Frequency)?;
            let rows = solution
                .omegas
                .iter()
                .enumerate()
                .map(|(i, &omega)| ResultRow {
                    label: format!("mode_{}", i + 1),
                    quantity: "omega".into(),
                    point: None,
                    side: None,
                    raw: omega,
                    nondim: scale.map(|f| omega / f),
                })
                .collect();
            let diagnostics = DiagnosticsReport::new(&solution.diagnostics, solution.residuals.clone());
            (solution.modes.swap_remove(0), diagnostics, rows)
        }
    };

    let mut points = config.outputs.points.clone();
    if points.is_empty() && matches!(config.analysis, AnalysisSpec::Static { .. }) {
        points.push(crate::batch::config::PointRequest {
            label: "w_c".into(),
            quantity: ProfileQuantity::W,
            at: [0.5, 0.5, 0.0],
            side: None,
        });
    }
    for p in &points {
        let (x, y, z) = (p.at[0] * dims.a, p.at[1] * dims.b, p.at[2] * dims.h);
        let raw = sample(&field, p.quantity, x, y, z, p.side)?;
        let scale = if matches!(config.analysis, AnalysisSpec::Static { .. }) {
            scale_of(quantity_kind(p.quantity))?
        } else {
            None
        };
        results.push(ResultRow {
            label: p.label.clone(),
            quantity: p.quantity.name().into(),
            point: Some([x, y, z]),
            side: p.side,
            raw,
            nondim: scale.map(|f| raw / f),
        });
    }

    let mut profiles = Vec::new();
    for req in &config.outputs.profiles {
        let (x, y) = (req.at[0] * dims.a, req.at[1] * dims.b);
        let rows = thickness_profile(&field, x, y, req.quantity, req.per_layer)?;
        let static_scale = match config.analysis {
            AnalysisSpec::Static { .. } => scale_of(quantity_kind(req.quantity))?,
            AnalysisSpec::Modal { .. } => None,
        };
        let scaling = match (&config.outputs.scaling, static_scale) {
            (Some(spec), Some(_)) => scaling_name(spec).to_string(),
            _ => "none".to_string(),
        };
        profiles.push(ProfileOutput {
            quantity: req.quantity,
            at: req.at,
            rows,
            scale: static_scale.unwrap_or(1.0),
            scaling,
        });
    }

    let profile_names = profile_file_names(&profiles);
    Ok(RunOutcome {
        report: RunReport {
            config: config.clone(),
            diagnostics,
            scaling: scheme,
            results,
            profiles: profile_names,
        },
        profiles,
    })
}

/// `profile_<qty>.csv`, with a numeric suffix when a quantity is requested
/// more than once.
fn profile_file_names(profiles: &[ProfileOutput]) -> Vec<String> {
    profiles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let earlier = profiles[..i].iter().filter(|q| q.quantity == p.quantity).count();
            if earlier == 0 {
                format!("profile_{}.csv", p.quantity)
            } else {
                format!("profile_{}_{}.csv", p.quantity, earlier + 1)
            }
        })
        .collect()
}

pub const RESULTS_HEADER: &str = "label,quantity,x,y,z,side,raw,nondim";

fn side_name(side: Option<Side>) -> &'static str {
    match side {
        Some(Side::Below) => "below",
        Some(Side::Above) => "above",
        None => "",
    }
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(format_sci).unwrap_or_default()
}

/// One CSV line per row, in the fixed column order of [`RESULTS_HEADER`].
pub fn result_csv_fields(row: &ResultRow) -> String {
    let [x, y, z] = match row.point {
        Some(p) => p.map(|c| format_sci(c)),
        None => [String::new(), String::new(), String::new()],
    };
    format!(
        "{},{},{x},{y},{z},{},{},{}",
        row.label,
        row.quantity,
        side_name(row.side),
        format_sci(row.raw),
        opt_sci(row.nondim)
    )
}

/// Writes `report.json`, `results.csv` and one `profile_<qty>.csv` per
/// requested profile. Returns the paths written.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let report_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(&outcome.report)?;
    json.push('\n');
    fs::write(&report_path, json)?;
    written.push(report_path);

    let results_path = dir.join("results.csv");
    let mut csv = String::from(RESULTS_HEADER);
    csv.push('\n');
    for row in &outcome.report.results {
        csv.push_str(&result_csv_fields(row));
        csv.push('\n');
    }
    fs::write(&results_path, csv)?;
    written.push(results_path);

    for (p, name) in outcome.profiles.iter().zip(&outcome.report.profiles) {
        let path = dir.join(name);
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, p.quantity, &p.scaling, &p.rows, p.scale)?;
        fs::File::create(&path)?.write_all(&buf)?;
        written.push(path);
    }
    Ok(written)
}
