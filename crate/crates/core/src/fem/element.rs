//! Element stiffness, consistent mass and load vectors of the eight-node plate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::load::LoadSpec;
use crate::fem::quadrature::gauss_square;
use crate::fem::section::Section;
use crate::fem::shape::{shape_functions, NODES};
use crate::theory::{strain_operators, Dof, Source, StrainTerm, TheoryVariant, NUM_BM, NUM_STRAINS};

/// Shape functions mapped to one point of a physical element.
#[derive(Debug, Clone, Copy)]
pub struct PointGeometry {
    pub n: [f64; NODES],
    /// `(dN/dx, dN/dy)` per node.
    pub dn: [[f64; 2]; NODES],
    pub det_j: f64,
    pub x: f64,
    pub y: f64,
}

/// Maps parent coordinates to physical ones; fails on a non-positive Jacobian.
pub fn point_geometry(element: usize, xe: &[[f64; 2]; NODES], xi: f64, eta: f64) -> Result<PointGeometry> {
    let (n, dn_ref) = shape_functions(xi, eta);
    let mut j = [[0.0; 2]; 2];
    let (mut x, mut y) = (0.0, 0.0);
    for k in 0..NODES {
        x += n[k] * xe[k][0];
        y += n[k] * xe[k][1];
        for r in 0..2 {
            j[r][0] += dn_ref[k][r] * xe[k][0];
            j[r][1] += dn_ref[k][r] * xe[k][1];
        }
    }
    // j[r][c] = d x_c / d xi_r
    let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det_j > 0.0) {
        return Err(Error::Element {
            element,
            reason: format!("non-positive Jacobian determinant {det_j:.3e} at ({xi}, {eta})"),
        });
    }
    let mut dn = [[0.0; 2]; NODES];
    for k in 0..NODES {
        let (a, b) = (dn_ref[k][0], dn_ref[k][1]);
        dn[k][0] = (j[1][1] * a - j[0][1] * b) / det_j;
        dn[k][1] = (-j[1][0] * a + j[0][0] * b) / det_j;
    }
    Ok(PointGeometry { n, dn, det_j, x, y })
}

/// Which displacement component and power of the thickness basis a DOF drives.
fn inertia_slot(dof: Dof) -> (usize, usize) {
    match dof {
        Dof::U0 => (0, 0),
        Dof::ThetaX => (0, 1),
        Dof::BetaX => (0, 2),
        Dof::PhiX => (0, 3),
        Dof::PsiX => (0, 4),
        Dof::V0 => (1, 0),
        Dof::ThetaY => (1, 1),
        Dof::BetaY => (1, 2),
        Dof::PhiY => (1, 3),
        Dof::PsiY => (1, 4),
        Dof::W0 => (2, 0),
        Dof::W1 => (2, 1),
        Dof::Gamma => (2, 2),
    }
}

/// Element integrator for one theory variant and one pre-integrated section.
#[derive(Debug, Clone)]
pub struct ElementKernel<'a> {
    pub variant: TheoryVariant,
    pub section: &'a Section,
    operators: Vec<(Dof, &'static [StrainTerm])>,
    quadrature: Vec<(f64, f64, f64)>,
}

impl<'a> ElementKernel<'a> {
    pub fn new(variant: TheoryVariant, section: &'a Section) -> Self {
        Self {
            variant,
            section,
            operators: strain_operators(variant),
            quadrature: gauss_square(3),
        }
    }

    /// Replaces the in-plane rule, e.g. to check invariance under point order.
    pub fn with_quadrature(mut self, quadrature: Vec<(f64, f64, f64)>) -> Self {
        self.quadrature = quadrature;
        self
    }

    /// Active unknowns per node.
    pub fn dofs_per_node(&self) -> usize {
        self.operators.len()
    }

    pub fn size(&self) -> usize {
        NODES * self.dofs_per_node()
    }

    /// Strain-displacement matrix over the 28 resultants, columns node-major.
    pub fn b_matrix(&self, g: &PointGeometry) -> DMatrix<f64> {
        let nd = self.dofs_per_node();
        let mut b = DMatrix::zeros(NUM_STRAINS, NODES * nd);
        for a in 0..NODES {
            for (s, (_, terms)) in self.operators.iter().enumerate() {
                for t in terms.iter() {
                    let f = match t.source {
                        Source::Value => g.n[a],
                        Source::DerivX => g.dn[a][0],
                        Source::DerivY => g.dn[a][1],
                    };
                    b[(t.row, a * nd + s)] += t.coeff * f;
                }
            }
        }
        b
    }

    pub fn stiffness(&self, element: usize, xe: &[[f64; 2]; NODES]) -> Result<DMatrix<f64>> {
        let size = self.size();
        let mut k = DMatrix::zeros(size, size);
        for &(xi, eta, w) in &self.quadrature {
            let g = point_geometry(element, xe, xi, eta)?;
            let b = self.b_matrix(&g);
            let db = &self.section.stiffness * &b;
            k.gemm_tr(w * g.det_j, &b, &db, 1.0);
        }
        symmetrize(&mut k);
        Ok(k)
    }

    /// Consistent mass with the full thickness-inertia coupling.
    pub fn mass(&self, element: usize, xe: &[[f64; 2]; NODES]) -> Result<DMatrix<f64>> {
        let nd = self.dofs_per_node();
        let mut psi = [[0.0; NODES]; NODES];
        for &(xi, eta, w) in &self.quadrature {
            let g = point_geometry(element, xe, xi, eta)?;
            for a in 0..NODES {
                for b in 0..NODES {
                    psi[a][b] += g.n[a] * g.n[b] * w * g.det_j;
                }
            }
        }
        let inertia = &self.section.inertia;
        let mut m_bar = DMatrix::zeros(nd, nd);
        for (s, (ds, _)) in self.operators.iter().enumerate() {
            for (t, (dt, _)) in self.operators.iter().enumerate() {
                let (cs, ps) = inertia_slot(*ds);
                let (ct, pt) = inertia_slot(*dt);
                if cs == ct {
                    m_bar[(s, t)] = inertia[ps][pt];
                }
            }
        }
        let mut m = DMatrix::zeros(NODES * nd, NODES * nd);
        for a in 0..NODES {
            for b in 0..NODES {
                let mut block = m.view_mut((a * nd, b * nd), (nd, nd));
                block += &m_bar * psi[a][b];
            }
        }
        Ok(m)
    }

    /// Consistent load vector. Pressure acts on the top surface `z = +h/2`.
    pub fn load(&self, element: usize, xe: &[[f64; 2]; NODES], load: &LoadSpec, a: f64, b: f64) -> Result<DVector<f64>> {
        let nd = self.dofs_per_node();
        let mut f = DVector::zeros(NODES * nd);
        let half = 0.5 * self.section.thickness;
        let w_slots: Vec<(usize, f64)> = [(Dof::W0, 1.0), (Dof::W1, half), (Dof::Gamma, half * half)]
            .into_iter()
            .filter_map(|(d, c)| self.variant.slot(d).map(|s| (s, c)))
            .collect();
        for &(xi, eta, w) in &self.quadrature {
            let g = point_geometry(element, xe, xi, eta)?;
            let dv = w * g.det_j;
            if load.is_thermal() {
                let t = load.temperature_factor(g.x, g.y, a, b);
                if t == 0.0 {
                    continue;
                }
                let bm = self.b_matrix(&g);
                let n_th = self.section.thermal.as_slice();
                for col in 0..NODES * nd {
                    let mut acc = 0.0;
                    for row in 0..NUM_BM {
                        acc += bm[(row, col)] * n_th[row];
                    }
                    f[col] += acc * t * dv;
                }
            } else {
                let q = load.pressure(g.x, g.y, a, b);
                for node in 0..NODES {
                    for &(s, c) in &w_slots {
                        f[node * nd + s] += g.n[node] * q * c * dv;
                    }
                }
            }
        }
        Ok(f)
    }
}

fn symmetrize(k: &mut DMatrix<f64>) {
    let n = k.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (k[(i, j)] + k[(j, i)]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::section::SectionOptions;
    use crate::layup::{Distribution, Layer, LayerMaterial, Layup};
    use crate::materials::{CoreMaterial, MaterialLibrary, TemperaturePolynomial};
    use approx::assert_relative_eq;

    fn plate(h: f64, rho: f64) -> Layup {
        let core = CoreMaterial {
            modulus: TemperaturePolynomial::constant(70e9),
            nu: 0.3,
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

    fn sandwich() -> Layup {
        let lib = MaterialLibrary::builtin();
        let nc = lib.nanocomposite("SWCNT-10-10", "PMMA", 0.17).unwrap();
        Layup::sandwich(0.05, 2.0, lib.core("Ti-6Al-4V").unwrap().clone(), nc, Distribution::FgX).unwrap()
    }

    fn distorted() -> [[f64; 2]; NODES] {
        let c = [[0.0, 0.0], [1.1, 0.1], [1.0, 0.9], [-0.1, 1.2]];
        let mut xe = [[0.0; 2]; NODES];
        xe[..4].copy_from_slice(&c);
        for (k, (p, q)) in [(0, 1), (1, 2), (2, 3), (3, 0)].into_iter().enumerate() {
            xe[4 + k] = [0.5 * (c[p][0] + c[q][0]), 0.5 * (c[p][1] + c[q][1])];
        }
        xe
    }

    #[test]
    fn stiffness_is_symmetric_and_semidefinite() {
        let section = Section::integrate(&sandwich(), &SectionOptions::default()).unwrap();
        for v in TheoryVariant::ALL {
            let k = ElementKernel::new(v, &section).stiffness(0, &distorted()).unwrap();
            let norm = k.abs().max();
            let asym = (&k - k.transpose()).abs().max();
            assert!(asym <= 1e-12 * norm);
            let eig = k.symmetric_eigenvalues();
            assert!(eig.min() >= -1e-9 * norm, "{v}: {}", eig.min());
        }
    }

    #[test]
    fn rigid_translations_carry_no_strain_energy() {
        let section = Section::integrate(&sandwich(), &SectionOptions::default()).unwrap();
        for v in TheoryVariant::ALL {
            let kernel = ElementKernel::new(v, &section);
            let k = kernel.stiffness(0, &distorted()).unwrap();
            let nd = kernel.dofs_per_node();
            for dof in [Dof::U0, Dof::V0, Dof::W0] {
                let s = v.slot(dof).unwrap();
                let e = DVector::from_fn(kernel.size(), |i, _| if i % nd == s { 1.0 } else { 0.0 });
                assert!((&k * e).amax() <= 1e-10 * k.amax(), "{v} {dof:?}");
            }
        }
    }

    #[test]
    fn translational_mass_equals_rho_h_area() {
        let (h, rho) = (0.02, 2700.0);
        let section = Section::integrate(&plate(h, rho), &SectionOptions::default()).unwrap();
        let kernel = ElementKernel::new(TheoryVariant::Hsdt13, &section);
        let xe = distorted();
        let m = kernel.mass(0, &xe).unwrap();
        // Area of the straight-sided quad by the shoelace formula.
        let c = &xe[..4];
        let area = 0.5 * (0..4).map(|i| c[i][0] * c[(i + 1) % 4][1] - c[(i + 1) % 4][0] * c[i][1]).sum::<f64>();
        let s = TheoryVariant::Hsdt13.slot(Dof::W0).unwrap();
        let e = DVector::from_fn(kernel.size(), |i, _| if i % 13 == s { 1.0 } else { 0.0 });
        assert_relative_eq!((e.transpose() * &m * &e)[0], rho * h * area, max_relative = 1e-12);
        // On a single layer the zig-zag term duplicates the rotation, so check
        // definiteness on a variant without it.
        let m = ElementKernel::new(TheoryVariant::Hsdt11B, &section).mass(0, &xe).unwrap();
        assert!(m.symmetric_eigenvalues().min() > 0.0);
    }

    #[test]
    fn quadrature_order_does_not_matter() {
        let section = Section::integrate(&sandwich(), &SectionOptions::default()).unwrap();
        let base = ElementKernel::new(TheoryVariant::Hsdt13, &section);
        let mut rule = gauss_square(3);
        rule.reverse();
        rule.swap(1, 5);
        let shuffled = base.clone().with_quadrature(rule);
        let (k1, k2) = (base.stiffness(0, &distorted()).unwrap(), shuffled.stiffness(0, &distorted()).unwrap());
        assert!((&k1 - &k2).amax() <= 1e-12 * k1.amax());
        let (m1, m2) = (base.mass(0, &distorted()).unwrap(), shuffled.mass(0, &distorted()).unwrap());
        assert!((&m1 - &m2).amax() <= 1e-12 * m1.amax());
    }

    #[test]
    fn inverted_element_is_rejected() {
        let section = Section::integrate(&plate(0.01, 1.0), &SectionOptions::default()).unwrap();
        let mut xe = distorted();
        xe.swap(1, 3);
        xe.swap(4, 7);
        xe.swap(5, 6);
        match ElementKernel::new(TheoryVariant::Fsdt5, &section).stiffness(7, &xe) {
            Err(Error::Element { element, .. }) => assert_eq!(element, 7),
            other => panic!("expected element error, got {other:?}"),
        }
    }

    #[test]
    fn pressure_distributes_to_stretch_terms() {
        let h = 0.1;
        let section = Section::integrate(&plate(h, 1.0), &SectionOptions::default()).unwrap();
        let kernel = ElementKernel::new(TheoryVariant::Hsdt13, &section);
        let f = kernel
            .load(0, &distorted(), &LoadSpec::UniformPressure { q0: 2.0 }, 1.0, 1.0)
            .unwrap();
        let sum = |d: Dof| (0..NODES).map(|n| f[n * 13 + d.index()]).sum::<f64>();
        assert_relative_eq!(sum(Dof::W1), 0.5 * h * sum(Dof::W0), max_relative = 1e-14);
        assert_relative_eq!(sum(Dof::Gamma), 0.25 * h * h * sum(Dof::W0), max_relative = 1e-14);
        assert_eq!(sum(Dof::U0), 0.0);
    }

    #[test]
    fn zero_expansion_gives_zero_thermal_load() {
        let core = CoreMaterial {
            modulus: TemperaturePolynomial::constant(70e9),
            nu: 0.3,
            alpha: TemperaturePolynomial::constant(0.0),
            rho: 1.0,
        };
        let layup = Layup::new(vec![Layer {
            bottom: -0.05,
            top: 0.05,
            material: LayerMaterial::Homogeneous(core),
        }])
        .unwrap();
        let section = Section::integrate(&layup, &SectionOptions::default()).unwrap();
        let f = ElementKernel::new(TheoryVariant::Hsdt13, &section)
            .load(0, &distorted(), &LoadSpec::ThermalSinusoidal { t0: 100.0 }, 2.0, 2.0)
            .unwrap();
        assert_eq!(f.amax(), 0.0);
    }
}
