//! Sampling of displacements and stresses from a solved plate, transverse
//! shear recovery from the equilibrium equations, nondimensional scalings and
//! through-thickness profiles.

pub mod nondim;
pub mod profile;

use std::sync::Arc;

use nalgebra::{DVector, Vector4};
use serde::{Deserialize, Serialize};

use crate::analysis::Model;
use crate::error::{Error, Result};
use crate::fem::assembly::DofMap;
use crate::fem::element::point_geometry;
use crate::fem::quadrature::integrate_adaptive;
use crate::fem::shape::{shape_functions, NODES};
use crate::fem::LoadSpec;
use crate::layup::Side;
use crate::materials::{constitutive, ConstitutiveMatrix, MaterialPoint};
use crate::theory::{bm_weights, displacement_expansion, zigzag_value, NodalDofs, StrainState, NUM_DOFS, NUM_STRAINS};

pub use nondim::{MechanicalScale, NondimScheme, Quantity, ThermalDeflection};
pub use profile::{format_sci, thickness_profile, ProfileQuantity, ProfileRow};

/// Parent-coordinate step of the five-point derivative stencil, which is
/// exact for the quartic strain fields of an undistorted element.
const FD_STEP: f64 = 0.05;

/// Gauss points per thickness panel of the shear recovery integral.
const RECOVERY_POINTS: usize = 8;
const RECOVERY_TOLERANCE: f64 = 1e-11;
const RECOVERY_MAX_DEPTH: usize = 30;

/// Which strain the constitutive law sees when a temperature field is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalStress {
    /// `σ = Q(ε − αΔT)`.
    #[default]
    Net,
    /// `σ = Qε`, ignoring the free thermal strain.
    Total,
}

/// A solved displacement field over the model's mesh.
#[derive(Debug, Clone)]
pub struct ResultField {
    model: Arc<Model>,
    load: Option<LoadSpec>,
    nodal: Vec<NodalDofs>,
    thermal_stress: ThermalStress,
}

/// Values and first derivatives of the 13 generalized unknowns at a point.
#[derive(Debug, Clone, Copy)]
struct FieldSample {
    value: NodalDofs,
    dx: NodalDofs,
    dy: NodalDofs,
}

impl ResultField {
    /// Expands the equation vector `x` of `dof_map` to nodal values.
    pub fn new(model: Arc<Model>, dof_map: &DofMap, x: &DVector<f64>, load: Option<LoadSpec>) -> Result<Self> {
        if dof_map.num_nodes() != model.mesh.num_nodes() || x.len() != dof_map.num_equations() {
            return Err(Error::Domain("solution vector does not match the model".into()));
        }
        let nodal = (0..model.mesh.num_nodes()).map(|n| dof_map.nodal_values(x, n)).collect();
        Ok(Self {
            model,
            load,
            nodal,
            thermal_stress: ThermalStress::Net,
        })
    }

    pub fn with_thermal_stress(mut self, convention: ThermalStress) -> Self {
        self.thermal_stress = convention;
        self
    }

    pub fn thermal_stress(&self) -> ThermalStress {
        self.thermal_stress
    }

    /// Temperature amplitude seen by the stress evaluators.
    fn stress_load(&self) -> Option<&LoadSpec> {
        match self.thermal_stress {
            ThermalStress::Net => self.load.as_ref(),
            ThermalStress::Total => None,
        }
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn load(&self) -> Option<&LoadSpec> {
        self.load.as_ref()
    }

    /// Generalized unknowns of a node in the fixed 13-slot order.
    pub fn nodal(&self, node: usize) -> &NodalDofs {
        &self.nodal[node]
    }

    fn sample(&self, element: usize, xi: f64, eta: f64) -> Result<FieldSample> {
        let mesh = &self.model.mesh;
        let g = point_geometry(element, &mesh.element_coords(element), xi, eta)?;
        let mut s = FieldSample {
            value: [0.0; NUM_DOFS],
            dx: [0.0; NUM_DOFS],
            dy: [0.0; NUM_DOFS],
        };
        for (a, &node) in mesh.elements[element].iter().enumerate() {
            let d = &self.nodal[node];
            for i in 0..NUM_DOFS {
                s.value[i] += g.n[a] * d[i];
                s.dx[i] += g.dn[a][0] * d[i];
                s.dy[i] += g.dn[a][1] * d[i];
            }
        }
        Ok(s)
    }

    /// Interpolated generalized unknowns at `(x, y)`.
    pub fn generalized_at(&self, x: f64, y: f64) -> Result<NodalDofs> {
        let (e, xi, eta) = self.model.mesh.locate(x, y)?;
        Ok(self.sample(e, xi, eta)?.value)
    }

    /// `(u, v, w)` at `(x, y, z)`; `side` picks the layer at an interface.
    pub fn displacement_at(&self, x: f64, y: f64, z: f64, side: Option<Side>) -> Result<[f64; 3]> {
        let dofs = self.generalized_at(x, y)?;
        displacement_expansion(&dofs, z, &self.model.layup, side, self.model.variant)
    }

    /// Strain resultants from the displacement gradients, averaged over the
    /// elements that contain `(x, y)`.
    pub fn strain_at(&self, x: f64, y: f64) -> Result<StrainState> {
        let hits = self.model.mesh.locate_all(x, y)?;
        let mut r = [0.0; NUM_STRAINS];
        for &(e, xi, eta) in &hits {
            let s = self.sample(e, xi, eta)?;
            let st = StrainState::from_fields(self.model.variant, &s.value, &s.dx, &s.dy);
            for (acc, v) in r.iter_mut().zip(st.resultants) {
                *acc += v / hits.len() as f64;
            }
        }
        Ok(StrainState { resultants: r })
    }

    /// Strain resultants and their in-plane gradients at `(x, y)`. Each
    /// containing element differentiates its own polynomial strain field; the
    /// results are averaged over those elements.
    pub fn strain_gradient_at(&self, x: f64, y: f64) -> Result<StrainGradient> {
        let mesh = &self.model.mesh;
        let hits = mesh.locate_all(x, y)?;
        let mut out = StrainGradient {
            value: [0.0; NUM_STRAINS],
            dx: [0.0; NUM_STRAINS],
            dy: [0.0; NUM_STRAINS],
        };
        let w = 1.0 / hits.len() as f64;
        let strain = |e: usize, xi: f64, eta: f64| -> Result<[f64; NUM_STRAINS]> {
            let s = self.sample(e, xi, eta)?;
            Ok(StrainState::from_fields(self.model.variant, &s.value, &s.dx, &s.dy).resultants)
        };
        for &(e, xi, eta) in &hits {
            let xe = mesh.element_coords(e);
            let jac = jacobian(&xe, xi, eta);
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let centre = strain(e, xi, eta)?;
            let mut d_ref = [[0.0; NUM_STRAINS]; 2];
            for (dir, d) in d_ref.iter_mut().enumerate() {
                let at = |t: f64| if dir == 0 { strain(e, xi + t, eta) } else { strain(e, xi, eta + t) };
                let (p1, m1) = (at(FD_STEP)?, at(-FD_STEP)?);
                let (p2, m2) = (at(2.0 * FD_STEP)?, at(-2.0 * FD_STEP)?);
                for i in 0..NUM_STRAINS {
                    d[i] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * FD_STEP);
                }
            }
            for i in 0..NUM_STRAINS {
                out.value[i] += w * centre[i];
                out.dx[i] += w * (jac[1][1] * d_ref[0][i] - jac[0][1] * d_ref[1][i]) / det;
                out.dy[i] += w * (-jac[1][0] * d_ref[0][i] + jac[0][0] * d_ref[1][i]) / det;
            }
        }
        Ok(out)
    }

    /// Temperature change at `(x, y, z)`; zero without a thermal load.
    pub fn temperature_at(&self, x: f64, y: f64, z: f64) -> f64 {
        match &self.load {
            Some(l) => l.temperature_factor(x, y, self.model.mesh.a, self.model.mesh.b) * 2.0 * z / self.model.thickness(),
            None => 0.0,
        }
    }

    fn material(&self, z: f64, side: Option<Side>) -> Result<(MaterialPoint, ConstitutiveMatrix)> {
        let mp = self.model.layup.material_at(z, side, self.model.options.temperature)?;
        let q = constitutive(&mp, self.model.options.closure)?;
        Ok((mp, q))
    }

    /// `(σxx, σyy, σzz, σxy)` from the constitutive law, less the free thermal strain.
    fn stress_from(&self, strain: &[f64; NUM_STRAINS], z: f64, side: Option<Side>, delta_t: f64) -> Result<Vector4<f64>> {
        let (mp, q) = self.material(z, side)?;
        let (s, _) = zigzag_value(&self.model.layup, z, side)?;
        let st = StrainState { resultants: *strain };
        let e = st.bm_at(z, s);
        let thermal = Vector4::new(mp.alpha11, mp.alpha22, 0.0, 0.0) * delta_t;
        Ok(q.bm * (Vector4::from(e) - thermal))
    }

    /// `(σxx, σyy, σxy)` at `(x, y, z)` from the displacement gradients. At
    /// an interface `side` is required.
    pub fn in_plane_stress_at(&self, x: f64, y: f64, z: f64, side: Option<Side>) -> Result<[f64; 3]> {
        let strain = self.strain_at(x, y)?;
        let delta_t = match self.stress_load() {
            Some(_) => self.temperature_at(x, y, z),
            None => 0.0,
        };
        let sigma = self.stress_from(&strain.resultants, z, side, delta_t)?;
        Ok([sigma[0], sigma[1], sigma[3]])
    }

    /// Transverse shear stresses at `(x, y)` recovered by integrating
    /// `σxz,z = −(σxx,x + σxy,y)` and `σyz,z = −(σxy,x + σyy,y)` upward from
    /// the traction-free bottom face.
    pub fn transverse_shear(&self, x: f64, y: f64) -> Result<ShearRecovery<'_>> {
        let strain = self.strain_gradient_at(x, y)?;
        let t_grad = match self.stress_load() {
            Some(l) => l.temperature_factor_gradient(x, y, self.model.mesh.a, self.model.mesh.b),
            None => [0.0, 0.0],
        };
        let mut recovery = ShearRecovery {
            field: self,
            strain,
            t_grad,
            below: Vec::new(),
        };
        let mut acc = [0.0; 2];
        for k in 0..self.model.layup.layers().len() {
            recovery.below.push(acc);
            let layer = &self.model.layup.layers()[k];
            let part = recovery.integral(k, layer.bottom, layer.top)?;
            acc = [acc[0] + part[0], acc[1] + part[1]];
        }
        recovery.below.push(acc);
        Ok(recovery)
    }
}

/// Strain resultants and their in-plane gradients at a point.
#[derive(Debug, Clone, Copy)]
pub struct StrainGradient {
    pub value: [f64; NUM_STRAINS],
    pub dx: [f64; NUM_STRAINS],
    pub dy: [f64; NUM_STRAINS],
}

/// Equilibrium recovery of `(σxz, σyz)` through the thickness at one `(x, y)`.
#[derive(Debug, Clone)]
pub struct ShearRecovery<'a> {
    field: &'a ResultField,
    strain: StrainGradient,
    t_grad: [f64; 2],
    /// Integral from the bottom face up to the bottom of each layer, plus the
    /// value at the top face as the last entry.
    below: Vec<[f64; 2]>,
}

impl ShearRecovery<'_> {
    /// In-plane stress divergence `(σxx,x + σxy,y, σxy,x + σyy,y)` at `z` in layer `k`.
    fn divergence(&self, k: usize, z: f64) -> Result<[f64; 2]> {
        let field = self.field;
        let layup = &field.model.layup;
        let layer = &layup.layers()[k];
        let mp = layer.material_at(z, field.model.options.temperature)?;
        let q = constitutive(&mp, field.model.options.closure)?;
        let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let s = 2.0 * sign * (z - layer.mid()) / layer.thickness();
        let w = bm_weights(z, s);
        let alpha = Vector4::new(mp.alpha11, mp.alpha22, 0.0, 0.0);
        let dtdz = 2.0 * z / field.model.thickness();
        let grad = |d: &[f64; NUM_STRAINS], t: f64| -> Vector4<f64> {
            let mut e = Vector4::zeros();
            for (j, wj) in w.iter().enumerate() {
                for c in 0..4 {
                    e[c] += wj * d[4 * j + c];
                }
            }
            q.bm * (e - alpha * (dtdz * t))
        };
        let sx = grad(&self.strain.dx, self.t_grad[0]);
        let sy = grad(&self.strain.dy, self.t_grad[1]);
        Ok([sx[0] + sy[3], sx[3] + sy[1]])
    }

    fn integral(&self, k: usize, lo: f64, hi: f64) -> Result<[f64; 2]> {
        if hi <= lo {
            return Ok([0.0, 0.0]);
        }
        integrate_adaptive(
            &mut |z| self.divergence(k, z),
            lo,
            hi,
            RECOVERY_POINTS,
            RECOVERY_TOLERANCE,
            RECOVERY_MAX_DEPTH,
        )
    }

    /// `(σxz, σyz)` at height `z`. The recovered profile is continuous, so no
    /// side flag is needed.
    pub fn at(&self, z: f64) -> Result<[f64; 2]> {
        let layup = &self.field.model.layup;
        let k = layup.layer_index(z, Some(Side::Below))?;
        let bottom = layup.layers()[k].bottom;
        let part = self.integral(k, bottom, z.max(bottom))?;
        Ok([-(self.below[k][0] + part[0]), -(self.below[k][1] + part[1])])
    }

    /// Recovered stresses at the top face; zero for an exact equilibrium field.
    pub fn top_residual(&self) -> [f64; 2] {
        let t = self.below[self.below.len() - 1];
        [-t[0], -t[1]]
    }
}

/// `jac[r][c] = ∂x_c / ∂ξ_r` at a parent point.
fn jacobian(xe: &[[f64; 2]; NODES], xi: f64, eta: f64) -> [[f64; 2]; 2] {
    let (_, dn) = shape_functions(xi, eta);
    let mut j = [[0.0; 2]; 2];
    for (d, p) in dn.iter().zip(xe) {
        for r in 0..2 {
            j[r][0] += d[r] * p[0];
            j[r][1] += d[r] * p[1];
        }
    }
    j
}
