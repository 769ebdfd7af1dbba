//! Through-thickness pre-integration of stiffness, inertia and thermal
//! resultants. Properties vary only with `z`, so this runs once per analysis.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};

use crate::error::Result;
use crate::fem::quadrature::gauss_interval;
use crate::layup::{Layup, Side};
use crate::materials::{constitutive, StretchClosure};
use crate::theory::{bm_weights, shear_weights, zigzag_value, NUM_BM, NUM_SHEAR, NUM_STRAINS};

/// Gauss points per thickness panel.
pub const POINTS_PER_LAYER: usize = 8;

/// Relative agreement between one panel and its two halves that ends bisection.
pub const THICKNESS_TOLERANCE: f64 = 1e-12;

const MAX_BISECTIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionOptions {
    pub temperature: f64,
    pub closure: StretchClosure,
    /// Multiplies the transverse shear stiffness of every layer.
    pub shear_correction: f64,
    pub points_per_layer: usize,
    /// Panels are bisected until halves and whole agree to this relative
    /// level. Zero integrates each layer with a single panel.
    pub tolerance: f64,
}

impl Default for SectionOptions {
    fn default() -> Self {
        Self {
            temperature: 300.0,
            closure: StretchClosure::Reduced,
            shear_correction: 1.0,
            points_per_layer: POINTS_PER_LAYER,
            tolerance: THICKNESS_TOLERANCE,
        }
    }
}

/// Pre-integrated section resultants.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// Block-diagonal generalized stiffness over the 28 strain resultants.
    pub stiffness: DMatrix<f64>,
    /// `inertia[i][j] = ∫ ρ f_i f_j dz` with `f = (1, z, z², z³, S)`.
    pub inertia: [[f64; 5]; 5],
    /// Thermal resultants per unit temperature amplitude for the profile
    /// `ΔT(z) = 2z/h`, conjugate to the 20 membrane/bending resultants.
    pub thermal: DVector<f64>,
    pub thickness: f64,
    /// Number of Gauss panels used over the whole thickness.
    pub panels: usize,
}

/// `(z, weight, layer index)` of every thickness quadrature point.
pub fn thickness_points(layup: &Layup, n: usize) -> Vec<(f64, f64, usize)> {
    layup
        .layers()
        .iter()
        .enumerate()
        .flat_map(|(k, l)| gauss_interval(n, l.bottom, l.top).into_iter().map(move |(z, w)| (z, w, k)))
        .collect()
}

struct Integrator<'a> {
    layup: &'a Layup,
    opts: &'a SectionOptions,
    h: f64,
}

impl Integrator<'_> {
    /// One Gauss panel, plus `∫|integrand|` of the thermal resultants for scaling.
    fn panel(&self, layer: usize, lo: f64, hi: f64) -> Result<(Section, DVector<f64>)> {
        let mut out = Section::zero(self.h);
        let mut thermal_abs = DVector::zeros(NUM_BM);
        out.panels = 1;
        let side = Some(Side::Above);
        for (z, wz) in gauss_interval(self.opts.points_per_layer, lo, hi) {
            debug_assert!(self.layup.layer_index(z, side)? == layer);
            let mp = self.layup.material_at(z, side, self.opts.temperature)?;
            let q = constitutive(&mp, self.opts.closure)?;
            let (s, ds) = zigzag_value(self.layup, z, side)?;
            let f = bm_weights(z, s);
            let g = shear_weights(z, ds);
            let alpha = Vector4::new(mp.alpha11, mp.alpha22, 0.0, 0.0);
            for i in 0..5 {
                for j in 0..5 {
                    let c = wz * f[i] * f[j];
                    let mut block = out.stiffness.view_mut((4 * i, 4 * j), (4, 4));
                    block += q.bm * c;
                    out.inertia[i][j] += wz * mp.rho * f[i] * f[j];
                }
                let n_th = q.bm * alpha * (wz * f[i] * 2.0 * z / self.h);
                let mut seg = out.thermal.rows_mut(4 * i, 4);
                seg += n_th;
                let mut seg = thermal_abs.rows_mut(4 * i, 4);
                seg += n_th.abs();
            }
            let qs = q.shear * self.opts.shear_correction;
            for i in 0..4 {
                for j in 0..4 {
                    let c = wz * g[i] * g[j];
                    let mut block = out.stiffness.view_mut((NUM_BM + 2 * i, NUM_BM + 2 * j), (2, 2));
                    block += qs * c;
                }
            }
        }
        Ok((out, thermal_abs))
    }

    /// Recursive bisection; `scale` is the single-panel estimate over the layer.
    fn adaptive(&self, layer: usize, lo: f64, hi: f64, whole: Section, scale: &Scale, depth: usize) -> Result<Section> {
        if self.opts.tolerance <= 0.0 {
            return Ok(whole);
        }
        let mid = 0.5 * (lo + hi);
        let (left, _) = self.panel(layer, lo, mid)?;
        let (right, _) = self.panel(layer, mid, hi)?;
        let mut halves = left.clone();
        halves.accumulate(&right);
        if depth >= MAX_BISECTIONS || halves.agrees_with(&whole, scale, self.opts.tolerance) {
            return Ok(halves);
        }
        let mut out = self.adaptive(layer, lo, mid, left, scale, depth + 1)?;
        out.accumulate(&self.adaptive(layer, mid, hi, right, scale, depth + 1)?);
        Ok(out)
    }
}

/// Per-entry magnitudes that bisection errors are measured against.
struct Scale {
    stiffness: DVector<f64>,
    inertia: [f64; 5],
    thermal: DVector<f64>,
}

impl Section {
    fn zero(h: f64) -> Self {
        Self {
            stiffness: DMatrix::zeros(NUM_STRAINS, NUM_STRAINS),
            inertia: [[0.0; 5]; 5],
            thermal: DVector::zeros(NUM_BM),
            thickness: h,
            panels: 0,
        }
    }

    fn accumulate(&mut self, other: &Section) {
        self.stiffness += &other.stiffness;
        for i in 0..5 {
            for j in 0..5 {
                self.inertia[i][j] += other.inertia[i][j];
            }
        }
        self.thermal += &other.thermal;
        self.panels += other.panels;
    }

    /// Entry-wise agreement, each entry measured against the diagonal scale
    /// `sqrt(|A_ii A_jj|)` of `scale`.
    fn agrees_with(&self, other: &Section, scale: &Scale, tol: f64) -> bool {
        let d = &scale.stiffness;
        for j in 0..NUM_STRAINS {
            for i in 0..NUM_STRAINS {
                let s = (d[i] * d[j]).abs().sqrt();
                if (self.stiffness[(i, j)] - other.stiffness[(i, j)]).abs() > tol * s {
                    return false;
                }
            }
        }
        for i in 0..5 {
            for j in 0..5 {
                let s = (scale.inertia[i] * scale.inertia[j]).abs().sqrt();
                if (self.inertia[i][j] - other.inertia[i][j]).abs() > tol * s {
                    return false;
                }
            }
        }
        (0..NUM_BM).all(|i| (self.thermal[i] - other.thermal[i]).abs() <= tol * scale.thermal[i])
    }

    pub fn integrate(layup: &Layup, opts: &SectionOptions) -> Result<Self> {
        let h = layup.thickness();
        let integrator = Integrator { layup, opts, h };
        let mut total = Section::zero(h);
        for (k, layer) in layup.layers().iter().enumerate() {
            let (whole, thermal_abs) = integrator.panel(k, layer.bottom, layer.top)?;
            let scale = Scale {
                stiffness: whole.stiffness.diagonal(),
                inertia: std::array::from_fn(|i| whole.inertia[i][i]),
                thermal: thermal_abs,
            };
            total.accumulate(&integrator.adaptive(k, layer.bottom, layer.top, whole, &scale, 0)?);
        }
        debug_assert_eq!(NUM_BM + NUM_SHEAR, NUM_STRAINS);
        Ok(total)
    }

    /// Membrane/bending block coupling families `i` and `j`.
    pub fn bm_block(&self, i: usize, j: usize) -> Matrix4<f64> {
        self.stiffness.fixed_view::<4, 4>(4 * i, 4 * j).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layup::{Distribution, Layer, LayerMaterial};
    use crate::materials::{CoreMaterial, MaterialLibrary, TemperaturePolynomial};
    use approx::assert_relative_eq;

    fn isotropic(h: f64, e: f64, nu: f64, rho: f64) -> Layup {
        let core = CoreMaterial {
            modulus: TemperaturePolynomial::constant(e),
            nu,
            alpha: TemperaturePolynomial::constant(1e-5),
            rho,
        };
        Layup::new(vec![Layer {
            bottom: -h / 2.0,
            top: h / 2.0,
            material: LayerMaterial::Homogeneous(core),
        }])
        .unwrap()
    }

    #[test]
    fn plate_rigidity_of_isotropic_layer() {
        let (h, e, nu) = (0.1, 70e9, 0.3);
        let s = Section::integrate(&isotropic(h, e, nu, 2700.0), &SectionOptions::default()).unwrap();
        let d = e * h.powi(3) / (12.0 * (1.0 - nu * nu));
        assert_relative_eq!(s.bm_block(1, 1)[(0, 0)], d, max_relative = 1e-13);
        assert_relative_eq!(s.bm_block(1, 1)[(0, 1)], nu * d, max_relative = 1e-13);
        assert_relative_eq!(s.bm_block(0, 0)[(0, 0)], e * h / (1.0 - nu * nu), max_relative = 1e-13);
        assert!(s.bm_block(0, 1).iter().all(|v| v.abs() < 1e-6 * d));
        let g = e / (2.0 * (1.0 + nu));
        assert_relative_eq!(s.stiffness[(NUM_BM, NUM_BM)], g * h, max_relative = 1e-13);
    }

    #[test]
    fn translational_inertia_is_areal_density() {
        let s = Section::integrate(&isotropic(0.02, 1e9, 0.2, 1500.0), &SectionOptions::default()).unwrap();
        assert_relative_eq!(s.inertia[0][0], 1500.0 * 0.02, max_relative = 1e-14);
        assert_relative_eq!(s.inertia[1][1], 1500.0 * 0.02f64.powi(3) / 12.0, max_relative = 1e-13);
        assert!(s.inertia[0][1].abs() < 1e-18);
    }

    fn sandwich() -> Layup {
        let lib = MaterialLibrary::builtin();
        let nc = lib.nanocomposite("SWCNT-10-10", "PMMA", 0.28).unwrap();
        Layup::sandwich(0.1, 2.0, lib.core("Ti-6Al-4V").unwrap().clone(), nc, Distribution::FgX).unwrap()
    }

    #[test]
    fn zigzag_inertia_moment_vanishes_for_symmetric_sandwich() {
        let s = Section::integrate(&sandwich(), &SectionOptions::default()).unwrap();
        // ∫ρ S dz and ∫ρ z dz are odd integrals.
        assert!(s.inertia[0][4].abs() < 1e-12 * s.inertia[0][0]);
        assert!(s.inertia[0][1].abs() < 1e-12 * s.inertia[0][0] * 0.1);
        assert!(s.inertia[4][4] > 0.0);
    }

    #[test]
    fn stiffness_is_symmetric() {
        let s = Section::integrate(&sandwich(), &SectionOptions::default()).unwrap();
        let d = &s.stiffness;
        let asym = (d - d.transpose()).abs().max();
        assert!(asym <= 1e-14 * d.abs().max());
    }

    #[test]
    fn adaptive_rule_matches_a_very_fine_fixed_rule() {
        // Q11 of a graded facesheet has a pole just outside the zero-fraction
        // face, so a single 8-point panel is only good to about 1e-6.
        let layup = sandwich();
        let coarse = Section::integrate(&layup, &SectionOptions::default()).unwrap();
        let fine = Section::integrate(
            &layup,
            &SectionOptions {
                points_per_layer: 200,
                tolerance: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        let single = Section::integrate(
            &layup,
            &SectionOptions {
                tolerance: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(coarse.panels > 3);
        let rel = |a: &Section| ((a.stiffness[(0, 0)] - fine.stiffness[(0, 0)]) / fine.stiffness[(0, 0)]).abs();
        assert!(rel(&single) > 1e-8);
        for (i, j) in [(0, 0), (4, 4), (8, 8), (5, 13), (16, 16), (20, 20), (26, 26)] {
            let (c, f) = (coarse.stiffness[(i, j)], fine.stiffness[(i, j)]);
            assert!((c - f).abs() <= 1e-11 * f.abs(), "({i},{j}): {c} vs {f}");
        }
    }

    #[test]
    fn symmetric_layup_has_no_thermal_membrane_resultant() {
        let s = Section::integrate(&sandwich(), &SectionOptions::default()).unwrap();
        // ΔT ∝ z on a symmetric layup: the membrane part is an odd integral.
        assert!(s.thermal[0].abs() < 1e-12 * s.thermal[4].abs());
        assert!(s.thermal[1].abs() < 1e-12 * s.thermal[5].abs());
    }
}
