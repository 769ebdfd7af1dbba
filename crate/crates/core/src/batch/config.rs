//! JSON analysis configuration. All physics lives in the file; unknown keys
//! are rejected so that a typo cannot silently fall back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{LoadSpec, Mesh, SectionOptions};
use crate::layup::{Distribution, Layup, Side};
use crate::materials::{MaterialLibrary, StretchClosure};
use crate::postprocess::{MechanicalScale, ProfileQuantity, ThermalDeflection, ThermalStress};
use crate::theory::TheoryVariant;

/// Temperature at which reference moduli, expansions and densities of the
/// nondimensional scalings are evaluated, K.
pub const REFERENCE_TEMPERATURE: f64 = 300.0;

/// Transverse shear correction used by the first-order theory when the
/// config leaves it unset. Every other theory defaults to 1.
pub const FIRST_ORDER_SHEAR_CORRECTION: f64 = 5.0 / 6.0;

const DEFAULT_STATIONS_PER_LAYER: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Free-form job identifier echoed into reports and error messages.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub geometry: Geometry,
    pub layup: LayupSpec,
    pub facesheet: CompositeSpec,
    /// Uniform ambient temperature at which properties are evaluated, K.
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    pub theory: TheoryVariant,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub section: SectionSpec,
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn default_temperature() -> f64 {
    REFERENCE_TEMPERATURE
}

/// Plate dimensions. Give the thickness either directly as `h` or as the
/// side-to-thickness ratio `a_over_h`; the width either as `b` or `a_over_b`
/// (square when both are absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_over_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_over_h: Option<f64>,
}

/// Resolved plate dimensions in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensions {
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

impl Geometry {
    pub fn resolve(&self) -> Result<Dimensions> {
        let a = self.a;
        let b = match (self.b, self.a_over_b) {
            (Some(_), Some(_)) => return Err(Error::Config("geometry: give `b` or `a_over_b`, not both".into())),
            (Some(b), None) => b,
            (None, Some(r)) => a / r,
            (None, None) => a,
        };
        let h = match (self.h, self.a_over_h) {
            (Some(h), None) => h,
            (None, Some(r)) => a / r,
            _ => return Err(Error::Config("geometry: give exactly one of `h` and `a_over_h`".into())),
        };
        for (name, v) in [("a", a), ("b", b), ("h", h)] {
            positive(&format!("geometry.{name}"), v)?;
        }
        Ok(Dimensions { a, b, h })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayupSpec {
    /// One reinforced layer through the whole thickness.
    Single,
    /// Homogeneous `core` between two reinforced facesheets.
    Sandwich { core: String, core_to_face: f64 },
}

/// Nanotube-reinforced material of the facesheets (or of the single layer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeSpec {
    pub cnt: String,
    pub matrix: String,
    pub v_star: f64,
    pub distribution: Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    /// When absent, variants with a thickness stretch use the 3D orthotropic
    /// stiffness and all others use the plane-stress reduced one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<StretchClosure>,
    /// Multiplier of the transverse shear stiffness. When absent, the
    /// first-order theory uses 5/6 and all others use 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shear_correction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisSpec {
    Static {
        load: LoadSpec,
        #[serde(default)]
        thermal_stress: ThermalStress,
    },
    Modal {
        modes: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Point values to report. A static run with none reports the centre
    /// deflection `w_c`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointRequest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<ProfileRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSpec>,
}

/// A value at `at = (x/a, y/b, z/h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRequest {
    pub label: String,
    pub quantity: ProfileQuantity,
    pub at: [f64; 3],
    /// Required when `z` falls on a layer interface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
}

/// A through-thickness profile at `at = (x/a, y/b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRequest {
    pub quantity: ProfileQuantity,
    pub at: [f64; 2],
    #[serde(default = "default_stations")]
    pub per_layer: usize,
}

fn default_stations() -> usize {
    DEFAULT_STATIONS_PER_LAYER
}

/// Nondimensionalization of reported values. Reference properties are those
/// of `reference_core` (default: the sandwich core) at the reference
/// temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingSpec {
    Mechanical {
        #[serde(default)]
        scale: MechanicalScale,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_core: Option<String>,
    },
    Thermal {
        #[serde(default)]
        deflection: ThermalDeflection,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_core: Option<String>,
    },
    ThicknessRatio,
    Frequency {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_core: Option<String>,
    },
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Label used in messages: the configured name or `unnamed`.
    pub fn job_id(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.resolve()?;
        if let LayupSpec::Sandwich { core_to_face, .. } = &self.layup {
            positive("layup.core_to_face", *core_to_face)?;
        }
        let v = self.facesheet.v_star;
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Config(format!("facesheet.v_star must lie in (0, 1), got {v}")));
        }
        positive("temperature", self.temperature)?;
        if self.mesh.nx == 0 || self.mesh.ny == 0 {
            return Err(Error::Config(format!(
                "mesh needs at least one element per side, got {} x {}",
                self.mesh.nx, self.mesh.ny
            )));
        }
        if let Some(k) = self.section.shear_correction {
            positive("section.shear_correction", k)?;
        }
        match self.analysis {
            AnalysisSpec::Static { load, .. } => load.validate().map_err(|e| Error::Config(e.to_string()))?,
            AnalysisSpec::Modal { modes } => {
                if modes == 0 {
                    return Err(Error::Config("analysis.modes must be at least 1".into()));
                }
            }
        }
        for p in &self.outputs.points {
            let [x, y, z] = p.at;
            if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) && (-0.5..=0.5).contains(&z)) {
                return Err(Error::Config(format!(
                    "point `{}`: `at` must be (x/a, y/b, z/h) within [0,1] x [0,1] x [-1/2,1/2]",
                    p.label
                )));
            }
        }
        for p in &self.outputs.profiles {
            let [x, y] = p.at;
            if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
                return Err(Error::Config(format!("profile {}: `at` must lie in [0,1] x [0,1]", p.quantity)));
            }
            if p.per_layer < 2 {
                return Err(Error::Config(format!("profile {}: per_layer must be at least 2", p.quantity)));
            }
        }
        Ok(())
    }

    pub fn shear_correction(&self) -> f64 {
        self.section.shear_correction.unwrap_or(match self.theory {
            TheoryVariant::Fsdt5 => FIRST_ORDER_SHEAR_CORRECTION,
            _ => 1.0,
        })
    }

    pub fn closure(&self) -> StretchClosure {
        self.section.closure.unwrap_or(if self.theory.has_stretch() {
            StretchClosure::Full3d
        } else {
            StretchClosure::Reduced
        })
    }

    pub fn section_options(&self) -> SectionOptions {
        SectionOptions {
            temperature: self.temperature,
            closure: self.closure(),
            shear_correction: self.shear_correction(),
            ..SectionOptions::default()
        }
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        let d = self.geometry.resolve()?;
        Mesh::rectangular(d.a, d.b, self.mesh.nx, self.mesh.ny)
    }

    pub fn build_layup(&self, library: &MaterialLibrary) -> Result<Layup> {
        let d = self.geometry.resolve()?;
        let f = &self.facesheet;
        let composite = library.nanocomposite(&f.cnt, &f.matrix, f.v_star)?;
        match &self.layup {
            LayupSpec::Single => Layup::single(d.h, composite, f.distribution),
            LayupSpec::Sandwich { core, core_to_face } => {
                Layup::sandwich(d.h, *core_to_face, library.core(core)?.clone(), composite, f.distribution)
            }
        }
    }

    /// Keys accepted by [`AnalysisConfig::apply_axis`].
    pub const AXES: [&'static str; 7] = [
        "a_over_h",
        "core_to_face",
        "v_star",
        "temperature",
        "theory",
        "distribution",
        "mesh",
    ];

    /// Sets one sweep axis to `value`; `key` is one of [`AnalysisConfig::AXES`].
    pub fn apply_axis(&mut self, key: &str, value: &str) -> Result<()> {
        let number = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("axis `{key}`: `{value}` is not a number")))
        };
        match key {
            "a_over_h" => {
                self.geometry.a_over_h = Some(number()?);
                self.geometry.h = None;
            }
            "core_to_face" => match &mut self.layup {
                LayupSpec::Sandwich { core_to_face, .. } => *core_to_face = number()?,
                LayupSpec::Single => return Err(Error::Config("axis `core_to_face` needs a sandwich layup".into())),
            },
            "v_star" => self.facesheet.v_star = number()?,
            "temperature" => self.temperature = number()?,
            "theory" => {
                self.theory = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
            }
            "distribution" => {
                self.facesheet.distribution = serde_json::from_value(serde_json::Value::String(value.to_string()))
                    .map_err(|_| Error::Config(format!("axis `distribution`: unknown value `{value}`")))?;
            }
            "mesh" => {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("axis `mesh`: `{value}` is not an element count")))?;
                self.mesh = MeshSpec { nx: n, ny: n };
            }
            _ => {
                return Err(Error::Config(format!(
                    "unknown sweep axis `{key}`; expected one of {}",
                    Self::AXES.join(", ")
                )))
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SANDWICH: &str = r#"{
        "name": "demo",
        "geometry": { "a": 1.0, "a_over_h": 5.0 },
        "layup": { "kind": "sandwich", "core": "Ti-6Al-4V", "core_to_face": 2.0 },
        "facesheet": { "cnt": "SWCNT-10-10", "matrix": "PMMA", "v_star": 0.17, "distribution": "FG-X" },
        "theory": "FSDT5",
        "mesh": { "nx": 4, "ny": 4 },
        "analysis": { "kind": "static", "load": { "kind": "sinusoidal_pressure", "q0": 1.0 } },
        "outputs": {
            "points": [ { "label": "w", "quantity": "w", "at": [0.5, 0.5, 0.5] } ],
            "scaling": { "kind": "mechanical", "scale": "tabulated" }
        }
    }"#;

    #[test]
    fn echo_round_trips() {
        let c = AnalysisConfig::from_json(SANDWICH).unwrap();
        let back = AnalysisConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.temperature, REFERENCE_TEMPERATURE);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SANDWICH.replace("\"theory\"", "\"theroy\": 1, \"theory\"");
        assert!(matches!(AnalysisConfig::from_json(&text), Err(Error::Config(_))));
    }

    #[test]
    fn zero_elements_is_a_config_error() {
        let text = SANDWICH.replace("\"nx\": 4", "\"nx\": 0");
        let err = AnalysisConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Config(m) if m.contains("mesh")));
    }

    #[test]
    fn thickness_must_be_given_once() {
        let text = SANDWICH.replace("\"a_over_h\": 5.0", "\"a_over_h\": 5.0, \"h\": 0.2");
        assert!(AnalysisConfig::from_json(&text).is_err());
        let c = AnalysisConfig::from_json(SANDWICH).unwrap();
        let d = c.geometry.resolve().unwrap();
        assert_eq!((d.a, d.b, d.h), (1.0, 1.0, 0.2));
    }

    #[test]
    fn first_order_default_shear_correction() {
        let mut c = AnalysisConfig::from_json(SANDWICH).unwrap();
        assert_eq!(c.shear_correction(), 5.0 / 6.0);
        c.apply_axis("theory", "HSDT13").unwrap();
        assert_eq!(c.shear_correction(), 1.0);
        c.section.shear_correction = Some(0.9);
        assert_eq!(c.shear_correction(), 0.9);
    }

    #[test]
    fn stretch_variants_default_to_full_stiffness() {
        let mut c = AnalysisConfig::from_json(SANDWICH).unwrap();
        for (theory, closure) in [
            ("FSDT5", StretchClosure::Reduced),
            ("HSDT11A", StretchClosure::Reduced),
            ("HSDT11B", StretchClosure::Full3d),
            ("HSDT13", StretchClosure::Full3d),
        ] {
            c.apply_axis("theory", theory).unwrap();
            assert_eq!(c.closure(), closure, "{theory}");
        }
        c.section.closure = Some(StretchClosure::Reduced);
        assert_eq!(c.closure(), StretchClosure::Reduced);
    }

    #[test]
    fn axes_update_the_config() {
        let mut c = AnalysisConfig::from_json(SANDWICH).unwrap();
        c.apply_axis("a_over_h", "10").unwrap();
        c.apply_axis("distribution", "UD").unwrap();
        c.apply_axis("mesh", "8").unwrap();
        assert_eq!(c.geometry.resolve().unwrap().h, 0.1);
        assert_eq!(c.facesheet.distribution, Distribution::Uniform);
        assert_eq!(c.mesh, MeshSpec { nx: 8, ny: 8 });
        assert!(c.apply_axis("colour", "red").is_err());
        assert!(c.apply_axis("v_star", "lots").is_err());
    }
}
