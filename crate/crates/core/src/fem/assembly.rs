//! Equation numbering, global assembly and simply-supported constraints.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::element::ElementKernel;
use crate::fem::load::LoadSpec;
use crate::fem::mesh::Mesh;
use crate::fem::shape::NODES;
use crate::solvers::skyline::{SkylineCholesky, SkylineMatrix};
use crate::theory::{Dof, NodalDofs, TheoryVariant, NUM_DOFS};

/// Unknowns held at zero on the edges `y = 0` and `y = b`.
pub const Y_EDGE_CONSTRAINTS: [Dof; 8] = [
    Dof::U0,
    Dof::W0,
    Dof::ThetaX,
    Dof::W1,
    Dof::Gamma,
    Dof::BetaX,
    Dof::PhiX,
    Dof::PsiX,
];

/// Unknowns held at zero on the edges `x = 0` and `x = a`.
pub const X_EDGE_CONSTRAINTS: [Dof; 8] = [
    Dof::V0,
    Dof::W0,
    Dof::ThetaY,
    Dof::W1,
    Dof::Gamma,
    Dof::BetaY,
    Dof::PhiY,
    Dof::PsiY,
];

/// Maps `(node, active unknown)` to an equation number, or `None` when constrained.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub variant: TheoryVariant,
    active: Vec<Dof>,
    equations: Vec<Option<usize>>,
    num_equations: usize,
}

impl DofMap {
    pub fn new(num_nodes: usize, variant: TheoryVariant, constrained: impl Fn(usize, Dof) -> bool) -> Self {
        let active = variant.active_dofs();
        let mut equations = Vec::with_capacity(num_nodes * active.len());
        let mut next = 0;
        for node in 0..num_nodes {
            for &d in &active {
                if constrained(node, d) {
                    equations.push(None);
                } else {
                    equations.push(Some(next));
                    next += 1;
                }
            }
        }
        Self {
            variant,
            active,
            equations,
            num_equations: next,
        }
    }

    pub fn unconstrained(num_nodes: usize, variant: TheoryVariant) -> Self {
        Self::new(num_nodes, variant, |_, _| false)
    }

    pub fn simply_supported(mesh: &Mesh, variant: TheoryVariant) -> Self {
        Self::new(mesh.num_nodes(), variant, |node, d| {
            (mesh.on_y_edge(node) && Y_EDGE_CONSTRAINTS.contains(&d))
                || (mesh.on_x_edge(node) && X_EDGE_CONSTRAINTS.contains(&d))
        })
    }

    pub fn dofs_per_node(&self) -> usize {
        self.active.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.equations.len() / self.active.len()
    }

    pub fn num_equations(&self) -> usize {
        self.num_equations
    }

    pub fn num_constrained(&self) -> usize {
        self.equations.len() - self.num_equations
    }

    pub fn equation(&self, node: usize, dof: Dof) -> Option<usize> {
        let slot = self.variant.slot(dof)?;
        self.equations[node * self.active.len() + slot]
    }

    /// Equations of an element's unknowns, node-major in slot order.
    pub fn element_equations(&self, conn: &[usize; NODES]) -> Vec<Option<usize>> {
        let nd = self.active.len();
        conn.iter()
            .flat_map(|&n| self.equations[n * nd..(n + 1) * nd].iter().copied())
            .collect()
    }

    /// `node N <dof>` label of an equation.
    pub fn describe(&self, equation: usize) -> String {
        match self.equations.iter().position(|e| *e == Some(equation)) {
            Some(p) => {
                let nd = self.active.len();
                format!("node {} {}", p / nd, self.active[p % nd].name())
            }
            None => format!("equation {equation}"),
        }
    }

    /// Nodal unknowns in the fixed 13-slot order; constrained and inactive slots are zero.
    pub fn nodal_values(&self, x: &DVector<f64>, node: usize) -> NodalDofs {
        let nd = self.active.len();
        let mut out = [0.0; NUM_DOFS];
        for (s, d) in self.active.iter().enumerate() {
            if let Some(e) = self.equations[node * nd + s] {
                out[d.index()] = x[e];
            }
        }
        out
    }
}

/// Assembled stiffness, optional mass and load over the free equations.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: SkylineMatrix,
    pub m: Option<SkylineMatrix>,
    pub f: DVector<f64>,
    pub dof_map: DofMap,
}

impl GlobalSystem {
    pub fn num_equations(&self) -> usize {
        self.dof_map.num_equations()
    }

    /// Cholesky factor of `K`; a singular pivot is reported by node and unknown.
    pub fn factor_stiffness(&self) -> Result<SkylineCholesky> {
        self.k.cholesky().map_err(|e| match e {
            Error::Singular { equation, pivot, .. } => Error::Singular {
                equation,
                pivot,
                node_dof: self.dof_map.describe(equation),
            },
            other => other,
        })
    }
}

struct ElementContribution {
    k: DMatrix<f64>,
    m: Option<DMatrix<f64>>,
    f: Option<DVector<f64>>,
}

/// Scatter-adds element matrices into the equations of `dof_map`. Constrained
/// rows and columns are dropped, which eliminates them.
pub fn assemble_with(
    mesh: &Mesh,
    kernel: &ElementKernel<'_>,
    load: Option<&LoadSpec>,
    with_mass: bool,
    dof_map: DofMap,
) -> Result<GlobalSystem> {
    if dof_map.variant != kernel.variant || dof_map.num_nodes() != mesh.num_nodes() {
        return Err(Error::Domain("equation map does not match the mesh and theory".into()));
    }
    let contributions: Vec<ElementContribution> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let xe = mesh.element_coords(e);
            Ok(ElementContribution {
                k: kernel.stiffness(e, &xe)?,
                m: if with_mass { Some(kernel.mass(e, &xe)?) } else { None },
                f: match load {
                    Some(l) => Some(kernel.load(e, &xe, l, mesh.a, mesh.b)?),
                    None => None,
                },
            })
        })
        .collect::<Result<_>>()?;

    let n = dof_map.num_equations();
    let eqs: Vec<Vec<usize>> = mesh
        .elements
        .iter()
        .map(|c| dof_map.element_equations(c).into_iter().flatten().collect())
        .collect();
    let profile = SkylineMatrix::profile_of(n, eqs.iter().map(|v| v.as_slice()));
    let mut k = SkylineMatrix::from_profile(profile.clone());
    let mut m = with_mass.then(|| SkylineMatrix::from_profile(profile));
    let mut f = DVector::zeros(n);
    for (conn, c) in mesh.elements.iter().zip(&contributions) {
        let local = dof_map.element_equations(conn);
        for (p, ep) in local.iter().enumerate() {
            let Some(i) = *ep else { continue };
            if let Some(fe) = &c.f {
                f[i] += fe[p];
            }
            for (q, eq) in local.iter().enumerate() {
                let Some(j) = *eq else { continue };
                if i > j {
                    continue;
                }
                k.add(i, j, c.k[(p, q)]);
                if let (Some(m), Some(me)) = (m.as_mut(), &c.m) {
                    m.add(i, j, me[(p, q)]);
                }
            }
        }
    }
    Ok(GlobalSystem { k, m, f, dof_map })
}

/// Unconstrained assembly over every node and active unknown.
pub fn assemble(mesh: &Mesh, kernel: &ElementKernel<'_>, load: Option<&LoadSpec>, with_mass: bool) -> Result<GlobalSystem> {
    assemble_with(
        mesh,
        kernel,
        load,
        with_mass,
        DofMap::unconstrained(mesh.num_nodes(), kernel.variant),
    )
}

/// Removes the rows and columns of simply-supported edge unknowns.
pub fn apply_simply_supported(system: &GlobalSystem, mesh: &Mesh) -> GlobalSystem {
    let target = DofMap::simply_supported(mesh, system.dof_map.variant);
    restrict(system, target)
}

/// Keeps the equations of `system` that remain free in `target`.
pub fn restrict(system: &GlobalSystem, target: DofMap) -> GlobalSystem {
    let src = &system.dof_map;
    let mut map = vec![None; src.num_equations()];
    for node in 0..src.num_nodes() {
        for &d in &src.active {
            if let (Some(old), Some(new)) = (src.equation(node, d), target.equation(node, d)) {
                map[old] = Some(new);
            }
        }
    }
    let n = target.num_equations();
    let mut first = vec![usize::MAX; n];
    for (old_j, nj) in map.iter().enumerate() {
        let Some(j) = *nj else { continue };
        let fr = system.k.first_row()[old_j];
        first[j] = (fr..=old_j).find_map(|i| map[i]).unwrap_or(j);
    }
    let copy = |a: &SkylineMatrix| {
        let mut out = SkylineMatrix::from_profile(first.clone());
        for (old_j, nj) in map.iter().enumerate() {
            let Some(j) = *nj else { continue };
            for old_i in a.first_row()[old_j]..=old_j {
                if let Some(i) = map[old_i] {
                    out.add(i, j, a.get(old_i, old_j));
                }
            }
        }
        out
    };
    let mut f = DVector::zeros(n);
    for (old, nj) in map.iter().enumerate() {
        if let Some(j) = nj {
            f[*j] = system.f[old];
        }
    }
    GlobalSystem {
        k: copy(&system.k),
        m: system.m.as_ref().map(copy),
        f,
        dof_map: target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::section::{Section, SectionOptions};
    use crate::layup::{Distribution, Layup};
    use crate::materials::MaterialLibrary;
    use approx::assert_relative_eq;

    fn section() -> Section {
        let lib = MaterialLibrary::builtin();
        let nc = lib.nanocomposite("SWCNT-10-10", "PMMA", 0.28).unwrap();
        let layup = Layup::sandwich(0.1, 4.0, lib.core("Ti-6Al-4V").unwrap().clone(), nc, Distribution::FgX).unwrap();
        Section::integrate(&layup, &SectionOptions::default()).unwrap()
    }

    #[test]
    fn fsdt_constraints_on_x_edge() {
        let mesh = Mesh::rectangular(1.0, 1.0, 2, 2).unwrap();
        let map = DofMap::simply_supported(&mesh, TheoryVariant::Fsdt5);
        // A mid-edge node on x = 0 that is not a corner.
        let node = (0..mesh.num_nodes())
            .find(|&n| mesh.on_x_edge(n) && !mesh.on_y_edge(n))
            .unwrap();
        let free: Vec<Dof> = TheoryVariant::Fsdt5
            .active_dofs()
            .into_iter()
            .filter(|&d| map.equation(node, d).is_some())
            .collect();
        assert_eq!(free, vec![Dof::U0, Dof::ThetaX]);
        let corner = (0..mesh.num_nodes()).find(|&n| mesh.on_x_edge(n) && mesh.on_y_edge(n)).unwrap();
        let free: Vec<Dof> = TheoryVariant::Fsdt5
            .active_dofs()
            .into_iter()
            .filter(|&d| map.equation(corner, d).is_some())
            .collect();
        assert!(free.is_empty());
    }

    #[test]
    fn equation_count_bookkeeping() {
        let mesh = Mesh::rectangular(1.0, 2.0, 3, 4).unwrap();
        for v in TheoryVariant::ALL {
            let map = DofMap::simply_supported(&mesh, v);
            assert_eq!(map.num_equations() + map.num_constrained(), mesh.num_nodes() * v.num_active());
        }
    }

    #[test]
    fn two_element_assembly_matches_hand_sum() {
        let s = section();
        let kernel = ElementKernel::new(TheoryVariant::Tsdt7, &s);
        let mesh = Mesh::rectangular(2.0, 1.0, 2, 1).unwrap();
        let sys = assemble(&mesh, &kernel, None, false).unwrap();
        let nd = kernel.dofs_per_node();
        let mut oracle = DMatrix::zeros(mesh.num_nodes() * nd, mesh.num_nodes() * nd);
        for (e, conn) in mesh.elements.iter().enumerate() {
            let ke = kernel.stiffness(e, &mesh.element_coords(e)).unwrap();
            for a in 0..NODES {
                for b in 0..NODES {
                    for s in 0..nd {
                        for t in 0..nd {
                            oracle[(conn[a] * nd + s, conn[b] * nd + t)] += ke[(a * nd + s, b * nd + t)];
                        }
                    }
                }
            }
        }
        let k = sys.k.to_dense();
        assert!((&k - &oracle).amax() <= 1e-12 * oracle.amax());
    }

    #[test]
    fn rigid_translations_are_in_the_unconstrained_nullspace() {
        let s = section();
        let mesh = Mesh::rectangular(1.0, 1.0, 3, 3).unwrap();
        for v in TheoryVariant::ALL {
            let sys = assemble(&mesh, &ElementKernel::new(v, &s), None, false).unwrap();
            for d in [Dof::U0, Dof::V0, Dof::W0] {
                let mut e = DVector::zeros(sys.num_equations());
                for n in 0..mesh.num_nodes() {
                    e[sys.dof_map.equation(n, d).unwrap()] = 1.0;
                }
                assert!(sys.k.mul_vec(&e).amax() <= 1e-10 * sys.k.max_abs(), "{v} {d:?}");
            }
        }
    }

    #[test]
    fn elimination_equals_direct_constrained_assembly() {
        let s = section();
        let mesh = Mesh::rectangular(1.0, 1.0, 2, 2).unwrap();
        let kernel = ElementKernel::new(TheoryVariant::Hsdt11B, &s);
        let load = LoadSpec::SinusoidalPressure { q0: 1.0 };
        let full = assemble(&mesh, &kernel, Some(&load), true).unwrap();
        let reduced = apply_simply_supported(&full, &mesh);
        let direct = assemble_with(
            &mesh,
            &kernel,
            Some(&load),
            true,
            DofMap::simply_supported(&mesh, TheoryVariant::Hsdt11B),
        )
        .unwrap();
        assert_eq!(reduced.k.first_row(), direct.k.first_row());
        assert!((reduced.k.to_dense() - direct.k.to_dense()).amax() <= 1e-12 * direct.k.max_abs());
        assert!((reduced.m.unwrap().to_dense() - direct.m.unwrap().to_dense()).amax() <= 1e-12);
        assert!((reduced.f - direct.f).amax() <= 1e-15);
    }

    #[test]
    fn total_pressure_load() {
        let s = section();
        let (a, b, q0) = (2.0, 1.5, 3.0);
        let mesh = Mesh::rectangular(a, b, 6, 4).unwrap();
        let kernel = ElementKernel::new(TheoryVariant::Fsdt5, &s);
        let total = |load: LoadSpec| {
            let sys = assemble(&mesh, &kernel, Some(&load), false).unwrap();
            (0..mesh.num_nodes())
                .map(|n| sys.f[sys.dof_map.equation(n, Dof::W0).unwrap()])
                .sum::<f64>()
        };
        assert_relative_eq!(total(LoadSpec::UniformPressure { q0 }), q0 * a * b, max_relative = 1e-13);
        let pi2 = std::f64::consts::PI.powi(2);
        assert_relative_eq!(
            total(LoadSpec::SinusoidalPressure { q0 }),
            q0 * a * b * 4.0 / pi2,
            max_relative = 1e-4
        );
    }

    #[test]
    fn antisymmetric_temperature_gives_no_net_membrane_force() {
        let s = section();
        let mesh = Mesh::rectangular(1.0, 1.0, 4, 4).unwrap();
        let sys = assemble(
            &mesh,
            &ElementKernel::new(TheoryVariant::Hsdt13, &s),
            Some(&LoadSpec::ThermalSinusoidal { t0: 100.0 }),
            false,
        )
        .unwrap();
        let scale = sys.f.amax();
        assert!(scale > 0.0);
        for n in 0..mesh.num_nodes() {
            for d in [Dof::U0, Dof::V0] {
                assert!(sys.f[sys.dof_map.equation(n, d).unwrap()].abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn assembled_matrices_are_symmetric_by_storage() {
        let s = section();
        let mesh = Mesh::rectangular(1.0, 1.0, 2, 2).unwrap();
        let sys = assemble(&mesh, &ElementKernel::new(TheoryVariant::Hsdt13, &s), None, true).unwrap();
        let k = sys.k.to_dense();
        assert!((&k - k.transpose()).amax() <= 1e-12 * k.amax());
        let m = sys.m.unwrap().to_dense();
        assert!((&m - m.transpose()).amax() <= 1e-12 * m.amax());
    }
}
