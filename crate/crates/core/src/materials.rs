//! Constituent data, CNT volume-fraction grading and rule-of-mixtures homogenization.
//!
//! All quantities are SI: moduli in Pa, densities in kg/m^3, expansion
//! coefficients in 1/K, temperatures in K.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Matrix2, Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference (stress-free) temperature of the constituent data.
pub const REFERENCE_TEMPERATURE: f64 = 300.0;

/// Polynomial in temperature, `sum c_i (T - reference)^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperaturePolynomial {
    #[serde(default)]
    pub reference: f64,
    pub coeffs: Vec<f64>,
}

impl TemperaturePolynomial {
    pub fn constant(value: f64) -> Self {
        Self {
            reference: 0.0,
            coeffs: vec![value],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let dt = t - self.reference;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * dt + c)
    }
}

/// Single-walled nanotube properties tabulated against temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CntMaterial {
    pub temperatures: Vec<f64>,
    pub e11: Vec<f64>,
    pub e22: Vec<f64>,
    pub g12: Vec<f64>,
    pub alpha11: Vec<f64>,
    pub alpha22: Vec<f64>,
    pub nu12: f64,
    pub rho: f64,
}

/// Nanotube properties interpolated at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CntState {
    pub e11: f64,
    pub e22: f64,
    pub g12: f64,
    pub alpha11: f64,
    pub alpha22: f64,
    pub nu12: f64,
    pub rho: f64,
}

impl CntMaterial {
    pub fn validate(&self) -> Result<()> {
        let n = self.temperatures.len();
        if n == 0 {
            return Err(Error::Material("CNT table is empty".into()));
        }
        for col in [&self.e11, &self.e22, &self.g12, &self.alpha11, &self.alpha22] {
            if col.len() != n {
                return Err(Error::Material("CNT table columns differ in length".into()));
            }
        }
        if self.temperatures.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Material("CNT table temperatures must increase".into()));
        }
        let moduli = self.e11.iter().chain(&self.e22).chain(&self.g12);
        if moduli.into_iter().any(|&e| e <= 0.0) || self.rho <= 0.0 {
            return Err(Error::Material("CNT moduli and density must be positive".into()));
        }
        Ok(())
    }

    /// Piecewise-linear interpolation of the temperature table.
    pub fn at(&self, t: f64) -> Result<CntState> {
        let ts = &self.temperatures;
        let (first, last) = (ts[0], ts[ts.len() - 1]);
        if !(first..=last).contains(&t) {
            return Err(Error::Domain(format!(
                "temperature {t} K outside CNT table range [{first}, {last}]"
            )));
        }
        let lerp = |col: &[f64]| -> f64 {
            if let Some(i) = ts.iter().position(|&ti| ti == t) {
                return col[i];
            }
            let i = ts.windows(2).position(|w| t >= w[0] && t <= w[1]).unwrap();
            let s = (t - ts[i]) / (ts[i + 1] - ts[i]);
            col[i] + s * (col[i + 1] - col[i])
        };
        Ok(CntState {
            e11: lerp(&self.e11),
            e22: lerp(&self.e22),
            g12: lerp(&self.g12),
            alpha11: lerp(&self.alpha11),
            alpha22: lerp(&self.alpha22),
            nu12: self.nu12,
            rho: self.rho,
        })
    }
}

/// Isotropic polymer matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixMaterial {
    pub modulus: TemperaturePolynomial,
    pub nu: f64,
    pub alpha: TemperaturePolynomial,
    pub rho: f64,
}

impl MatrixMaterial {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 0.5) {
            return Err(Error::Material(format!("matrix Poisson ratio {} not in (0, 0.5)", self.nu)));
        }
        if self.rho <= 0.0 {
            return Err(Error::Material("matrix density must be positive".into()));
        }
        Ok(())
    }

    pub fn modulus_at(&self, t: f64) -> Result<f64> {
        let e = self.modulus.eval(t);
        if e <= 0.0 {
            return Err(Error::Material(format!("matrix modulus {e} Pa at {t} K is not positive")));
        }
        Ok(e)
    }

    /// Shear modulus of the isotropic matrix.
    pub fn shear_modulus_at(&self, t: f64) -> Result<f64> {
        Ok(self.modulus_at(t)? / (2.0 * (1.0 + self.nu)))
    }
}

/// Isotropic homogeneous core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreMaterial {
    pub modulus: TemperaturePolynomial,
    pub nu: f64,
    pub alpha: TemperaturePolynomial,
    pub rho: f64,
}

impl CoreMaterial {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > -1.0 && self.nu < 0.5) || self.rho <= 0.0 {
            return Err(Error::Material("core Poisson ratio or density out of range".into()));
        }
        Ok(())
    }

    pub fn modulus_at(&self, t: f64) -> Result<f64> {
        let e = self.modulus.eval(t);
        if e <= 0.0 {
            return Err(Error::Material(format!("core modulus {e} Pa at {t} K is not positive")));
        }
        Ok(e)
    }

    pub fn point(&self, t: f64) -> Result<MaterialPoint> {
        let e = self.modulus_at(t)?;
        let g = e / (2.0 * (1.0 + self.nu));
        let alpha = self.alpha.eval(t);
        Ok(MaterialPoint {
            e11: e,
            e22: e,
            g12: g,
            g13: g,
            g23: g,
            nu12: self.nu,
            nu21: self.nu,
            alpha11: alpha,
            alpha22: alpha,
            rho: self.rho,
        })
    }
}

/// CNT efficiency parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencyParams {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencyPreset {
    pub v_star: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

/// Through-thickness CNT volume fraction law for one layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GradingRule {
    /// Constant `v_star`.
    Uniform { v_star: f64 },
    /// `(1 + 2 (z - zc)/t) v_star`: zero at `bottom`, `2 v_star` at `top`.
    LinearV { v_star: f64, bottom: f64, top: f64 },
    /// `2 (2 |z - zc| / t) v_star`: zero at mid-layer, `2 v_star` at both faces.
    LinearX { v_star: f64, bottom: f64, top: f64 },
    /// `2 (z - inner)/(outer - inner) v_star`: zero at the core side, `2 v_star`
    /// at the outer skin. `inner` may lie above or below `outer`.
    Facesheet { v_star: f64, inner: f64, outer: f64 },
}

impl GradingRule {
    pub fn v_star(&self) -> f64 {
        match *self {
            GradingRule::Uniform { v_star }
            | GradingRule::LinearV { v_star, .. }
            | GradingRule::LinearX { v_star, .. }
            | GradingRule::Facesheet { v_star, .. } => v_star,
        }
    }

    fn span(&self) -> Option<(f64, f64)> {
        match *self {
            GradingRule::Uniform { .. } => None,
            GradingRule::LinearV { bottom, top, .. } | GradingRule::LinearX { bottom, top, .. } => {
                Some((bottom, top))
            }
            GradingRule::Facesheet { inner, outer, .. } => Some((inner.min(outer), inner.max(outer))),
        }
    }

    /// CNT volume fraction at `z`.
    pub fn volume_fraction(&self, z: f64) -> Result<f64> {
        if let Some((lo, hi)) = self.span() {
            let slack = 1e-12 * (hi - lo).abs().max(f64::MIN_POSITIVE);
            if z < lo - slack || z > hi + slack {
                return Err(Error::Domain(format!("z = {z} outside graded layer [{lo}, {hi}]")));
            }
        }
        let v = match *self {
            GradingRule::Uniform { v_star } => v_star,
            GradingRule::LinearV { v_star, bottom, top } => {
                let zc = 0.5 * (bottom + top);
                (1.0 + 2.0 * (z - zc) / (top - bottom)) * v_star
            }
            GradingRule::LinearX { v_star, bottom, top } => {
                let zc = 0.5 * (bottom + top);
                2.0 * (2.0 * (z - zc).abs() / (top - bottom)) * v_star
            }
            GradingRule::Facesheet { v_star, inner, outer } => 2.0 * (z - inner) / (outer - inner) * v_star,
        };
        Ok(v.clamp(0.0, 1.0))
    }
}

/// Effective properties at one material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialPoint {
    pub e11: f64,
    pub e22: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub nu12: f64,
    pub nu21: f64,
    pub alpha11: f64,
    pub alpha22: f64,
    pub rho: f64,
}

/// Matrix reinforced with aligned nanotubes at a target fraction `v_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nanocomposite {
    pub cnt: CntMaterial,
    pub matrix: MatrixMaterial,
    pub eta: EfficiencyParams,
    pub v_star: f64,
}

impl Nanocomposite {
    pub fn properties(&self, v_cn: f64, t: f64) -> Result<MaterialPoint> {
        effective_properties(&self.cnt, &self.matrix, &self.eta, v_cn, self.v_star, t)
    }
}

/// Rule of mixtures with efficiency parameters.
///
/// The major Poisson ratio mixes with the layer target fraction `v_star`, so
/// it is constant within a graded layer. `G13 = G12` and `G23 = 1.2 G12`.
pub fn effective_properties(
    cnt: &CntMaterial,
    matrix: &MatrixMaterial,
    eta: &EfficiencyParams,
    v_cn: f64,
    v_star: f64,
    t: f64,
) -> Result<MaterialPoint> {
    if !(0.0..=1.0).contains(&v_cn) {
        return Err(Error::Domain(format!("CNT volume fraction {v_cn} outside [0, 1]")));
    }
    let c = cnt.at(t)?;
    let v_m = 1.0 - v_cn;
    let e_m = matrix.modulus_at(t)?;
    let g_m = matrix.shear_modulus_at(t)?;
    let alpha_m = matrix.alpha.eval(t);

    let e11 = eta.eta1 * v_cn * c.e11 + v_m * e_m;
    let e22 = eta.eta2 / (v_cn / c.e22 + v_m / e_m);
    let g12 = eta.eta3 / (v_cn / c.g12 + v_m / g_m);
    let nu12 = c.nu12 * v_star + matrix.nu * (1.0 - v_star);
    let rho = c.rho * v_cn + matrix.rho * v_m;
    let alpha11 = c.alpha11 * v_cn + alpha_m * v_m;
    let alpha22 = (1.0 + c.nu12) * v_cn * c.alpha22 + (1.0 + matrix.nu) * v_m * alpha_m - nu12 * alpha11;

    Ok(MaterialPoint {
        e11,
        e22,
        g12,
        g13: g12,
        g23: 1.2 * g12,
        nu12,
        nu21: nu12 * e22 / e11,
        alpha11,
        alpha22,
        rho,
    })
}

/// How the transverse normal stress couples to the in-plane strains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StretchClosure {
    /// `sigma_zz = Q33 eps_zz` with `Q33 = E22 / (1 - nu12 nu21)`, no coupling.
    #[default]
    Reduced,
    /// Orthotropic 3D compliance inverted with `nu13 = nu23 = nu12`, `E33 = E22`.
    Full3d,
}

/// Stiffness coefficients of one layer.
///
/// `bm` acts on `(eps_xx, eps_yy, eps_zz, gamma_xy)`, `shear` on `(gamma_xz, gamma_yz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveMatrix {
    pub bm: Matrix4<f64>,
    pub shear: Matrix2<f64>,
}

pub fn constitutive(mp: &MaterialPoint, closure: StretchClosure) -> Result<ConstitutiveMatrix> {
    let denom = 1.0 - mp.nu12 * mp.nu21;
    if !(denom > 0.0) || mp.e11 <= 0.0 || mp.e22 <= 0.0 {
        return Err(Error::Material(format!(
            "1 - nu12 nu21 = {denom} with E11 = {}, E22 = {}",
            mp.e11, mp.e22
        )));
    }
    let mut bm = Matrix4::zeros();
    match closure {
        StretchClosure::Reduced => {
            bm[(0, 0)] = mp.e11 / denom;
            bm[(1, 1)] = mp.e22 / denom;
            bm[(0, 1)] = mp.nu21 * mp.e11 / denom;
            bm[(1, 0)] = bm[(0, 1)];
            bm[(2, 2)] = mp.e22 / denom;
        }
        StretchClosure::Full3d => {
            let (e1, e2, e3) = (mp.e11, mp.e22, mp.e22);
            let (nu12, nu13, nu23) = (mp.nu12, mp.nu12, mp.nu12);
            #[rustfmt::skip]
            let compliance = Matrix3::new(
                1.0 / e1,    -nu12 / e1, -nu13 / e1,
                -nu12 / e1,  1.0 / e2,   -nu23 / e2,
                -nu13 / e1,  -nu23 / e2, 1.0 / e3,
            );
            let c = compliance
                .try_inverse()
                .filter(|c| c.diagonal().iter().all(|&d| d > 0.0))
                .ok_or_else(|| Error::Material("3D orthotropic compliance is not invertible".into()))?;
            for i in 0..3 {
                for j in 0..3 {
                    bm[(i, j)] = c[(i, j)];
                }
            }
        }
    }
    bm[(3, 3)] = mp.g12;
    let shear = Matrix2::new(mp.g13, 0.0, 0.0, mp.g23);
    Ok(ConstitutiveMatrix { bm, shear })
}

/// Named constituent library, loadable from JSON (see `data/materials.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialLibrary {
    pub cnt: BTreeMap<String, CntMaterial>,
    pub matrices: BTreeMap<String, MatrixMaterial>,
    pub cores: BTreeMap<String, CoreMaterial>,
    pub efficiency: BTreeMap<String, Vec<EfficiencyPreset>>,
}

const BUILTIN_LIBRARY: &str = include_str!("../data/materials.json");

impl MaterialLibrary {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN_LIBRARY).expect("bundled material library is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let lib: MaterialLibrary = serde_json::from_str(text)?;
        lib.validate()?;
        Ok(lib)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.cnt.values().try_for_each(CntMaterial::validate)?;
        self.matrices.values().try_for_each(MatrixMaterial::validate)?;
        self.cores.values().try_for_each(CoreMaterial::validate)?;
        for (name, presets) in &self.efficiency {
            if presets.iter().any(|p| p.eta1 <= 0.0 || p.eta2 <= 0.0 || p.eta3 <= 0.0) {
                return Err(Error::Material(format!("efficiency preset `{name}` has a non-positive eta")));
            }
        }
        Ok(())
    }

    pub fn cnt(&self, name: &str) -> Result<&CntMaterial> {
        self.cnt.get(name).ok_or_else(|| unknown("CNT material", name))
    }

    pub fn matrix(&self, name: &str) -> Result<&MatrixMaterial> {
        self.matrices.get(name).ok_or_else(|| unknown("matrix material", name))
    }

    pub fn core(&self, name: &str) -> Result<&CoreMaterial> {
        self.cores.get(name).ok_or_else(|| unknown("core material", name))
    }

    /// Efficiency parameters calibrated for `matrix` at target fraction `v_star`.
    pub fn efficiency(&self, matrix: &str, v_star: f64) -> Result<EfficiencyParams> {
        self.efficiency
            .get(matrix)
            .and_then(|set| set.iter().find(|p| (p.v_star - v_star).abs() < 1e-9))
            .map(|p| EfficiencyParams {
                eta1: p.eta1,
                eta2: p.eta2,
                eta3: p.eta3,
            })
            .ok_or_else(|| unknown("efficiency preset", &format!("{matrix} at V* = {v_star}")))
    }

    pub fn nanocomposite(&self, cnt: &str, matrix: &str, v_star: f64) -> Result<Nanocomposite> {
        Ok(Nanocomposite {
            cnt: self.cnt(cnt)?.clone(),
            matrix: self.matrix(matrix)?.clone(),
            eta: self.efficiency(matrix, v_star)?,
            v_star,
        })
    }
}

fn unknown(kind: &'static str, name: &str) -> Error {
    Error::Unknown {
        kind,
        name: name.to_string(),
    }
}
