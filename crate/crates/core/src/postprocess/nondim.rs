//! Nondimensional scalings of displacements, stresses and frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which printed quantity a raw value is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// In-plane displacement `u` or `v`, m.
    InPlane,
    /// Transverse displacement `w`, m.
    Deflection,
    /// In-plane normal stress, Pa.
    NormalStress,
    /// Transverse shear stress, Pa.
    ShearStress,
    /// Circular frequency, rad/s.
    Frequency,
}

/// Multipliers of the mechanical displacement scalings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanicalScale {
    /// `ū = 100 E u / (q0 h S³)`, `w̄ = 100 E w / (q0 h S⁴)`.
    #[default]
    AsPrinted,
    /// `ū = 10 E u / (q0 h S³)`, `w̄ = E w / (q0 h S⁴)`.
    Tabulated,
}

impl MechanicalScale {
    fn multipliers(self) -> (f64, f64) {
        match self {
            MechanicalScale::AsPrinted => (100.0, 100.0),
            MechanicalScale::Tabulated => (10.0, 1.0),
        }
    }
}

/// How the thermal deflection is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalDeflection {
    /// `w / (h α T0 h S⁴)`.
    #[default]
    AsPrinted,
    /// `w / (h α T0 S⁴)`.
    SingleH,
    /// `w / (h α T0 S²)`.
    Tabulated,
}

/// A pure scaling `raw ↦ raw / factor` for each applicable quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NondimScheme {
    /// Pressure of amplitude `q0`; `modulus` is the reference Young's modulus.
    Mechanical {
        q0: f64,
        modulus: f64,
        h: f64,
        s: f64,
        #[serde(default)]
        scale: MechanicalScale,
    },
    /// Temperature amplitude `t0` with reference modulus and expansion.
    Thermal {
        t0: f64,
        modulus: f64,
        alpha: f64,
        h: f64,
        s: f64,
        deflection: ThermalDeflection,
    },
    /// Displacements as a percentage of the thickness, `w̄ = 100 w / h`.
    ThicknessRatio { h: f64 },
    /// `Ω = ω a²/h sqrt(ρ/E)`.
    Frequency { a: f64, h: f64, density: f64, modulus: f64 },
}

impl NondimScheme {
    /// Divisor that maps a raw value of `quantity` to its nondimensional form.
    pub fn factor(&self, quantity: Quantity) -> Result<f64> {
        let f = match (*self, quantity) {
            (
                NondimScheme::Mechanical {
                    q0,
                    modulus,
                    h,
                    s,
                    scale,
                },
                q,
            ) => {
                let base = q0 * h / modulus;
                let (m_in_plane, m_deflection) = scale.multipliers();
                match q {
                    Quantity::InPlane => base * s.powi(3) / m_in_plane,
                    Quantity::Deflection => base * s.powi(4) / m_deflection,
                    Quantity::NormalStress => q0 * s * s,
                    Quantity::ShearStress => q0 * s,
                    Quantity::Frequency => return Err(not_applicable(quantity, "mechanical")),
                }
            }
            (
                NondimScheme::Thermal {
                    t0,
                    modulus,
                    alpha,
                    h,
                    s,
                    deflection,
                },
                q,
            ) => match q {
                Quantity::InPlane => 10.0 * h * alpha * t0 * s,
                Quantity::Deflection => match deflection {
                    ThermalDeflection::AsPrinted => h * alpha * t0 * h * s.powi(4),
                    ThermalDeflection::SingleH => h * alpha * t0 * s.powi(4),
                    ThermalDeflection::Tabulated => h * alpha * t0 * s * s,
                },
                Quantity::NormalStress => 100.0 * modulus * alpha * t0,
                Quantity::ShearStress => 10.0 * modulus * alpha * t0,
                Quantity::Frequency => return Err(not_applicable(quantity, "thermal")),
            },
            (NondimScheme::ThicknessRatio { h }, Quantity::InPlane | Quantity::Deflection) => h / 100.0,
            (NondimScheme::ThicknessRatio { .. }, q) => return Err(not_applicable(q, "thickness-ratio")),
            (NondimScheme::Frequency { a, h, density, modulus }, Quantity::Frequency) => {
                h / (a * a) * (modulus / density).sqrt()
            }
            (NondimScheme::Frequency { .. }, q) => return Err(not_applicable(q, "frequency")),
        };
        if !(f.is_finite() && f != 0.0) {
            return Err(Error::Domain(format!("degenerate {quantity:?} scaling {f}; check load amplitude and references")));
        }
        Ok(f)
    }

    pub fn apply(&self, quantity: Quantity, raw: f64) -> Result<f64> {
        Ok(raw / self.factor(quantity)?)
    }

    pub fn invert(&self, quantity: Quantity, scaled: f64) -> Result<f64> {
        Ok(scaled * self.factor(quantity)?)
    }
}

fn not_applicable(quantity: Quantity, scheme: &str) -> Error {
    Error::Domain(format!("{quantity:?} has no {scheme} scaling"))
}
