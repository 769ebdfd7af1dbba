//! Transverse pressure and through-thickness temperature loads.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSpec {
    /// `q = q0 sin(πx/a) sin(πy/b)` on the top surface, Pa.
    SinusoidalPressure { q0: f64 },
    /// `q = q0` on the top surface, Pa.
    UniformPressure { q0: f64 },
    /// `ΔT = t0 (2z/h) sin(πx/a) sin(πy/b)`, K.
    ThermalSinusoidal { t0: f64 },
}

impl LoadSpec {
    pub fn validate(&self) -> Result<()> {
        let amp = self.amplitude();
        if !amp.is_finite() || amp == 0.0 {
            return Err(Error::Config(format!("load amplitude must be finite and nonzero, got {amp}")));
        }
        Ok(())
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            LoadSpec::SinusoidalPressure { q0 } | LoadSpec::UniformPressure { q0 } => q0,
            LoadSpec::ThermalSinusoidal { t0 } => t0,
        }
    }

    pub fn is_thermal(&self) -> bool {
        matches!(self, LoadSpec::ThermalSinusoidal { .. })
    }

    /// Top-surface pressure at `(x, y)`; zero for thermal loads.
    pub fn pressure(&self, x: f64, y: f64, a: f64, b: f64) -> f64 {
        match *self {
            LoadSpec::SinusoidalPressure { q0 } => q0 * sine_mode(x, y, a, b),
            LoadSpec::UniformPressure { q0 } => q0,
            LoadSpec::ThermalSinusoidal { .. } => 0.0,
        }
    }

    /// In-plane factor of the temperature field, so `ΔT = factor · 2z/h`.
    pub fn temperature_factor(&self, x: f64, y: f64, a: f64, b: f64) -> f64 {
        match *self {
            LoadSpec::ThermalSinusoidal { t0 } => t0 * sine_mode(x, y, a, b),
            _ => 0.0,
        }
    }

    /// Gradient of [`Self::temperature_factor`].
    pub fn temperature_factor_gradient(&self, x: f64, y: f64, a: f64, b: f64) -> [f64; 2] {
        match *self {
            LoadSpec::ThermalSinusoidal { t0 } => {
                let (sx, cx) = (PI * x / a).sin_cos();
                let (sy, cy) = (PI * y / b).sin_cos();
                [t0 * PI / a * cx * sy, t0 * PI / b * sx * cy]
            }
            _ => [0.0, 0.0],
        }
    }
}

fn sine_mode(x: f64, y: f64, a: f64, b: f64) -> f64 {
    (PI * x / a).sin() * (PI * y / b).sin()
}
