//! A plate model bundling mesh, layup, theory and section, with the static
//! and free-vibration pipelines that turn it into result fields.

use std::sync::Arc;

use crate::error::Result;
use crate::fem::assembly::{assemble_with, DofMap, GlobalSystem};
use crate::fem::{ElementKernel, LoadSpec, Mesh, Section, SectionOptions};
use crate::layup::Layup;
use crate::postprocess::ResultField;
use crate::solvers::{solve_modes, solve_static, EigenOptions};
use crate::theory::TheoryVariant;

/// Everything needed to assemble a simply-supported plate.
#[derive(Debug, Clone)]
pub struct Model {
    pub mesh: Mesh,
    pub layup: Layup,
    pub variant: TheoryVariant,
    pub options: SectionOptions,
    pub section: Section,
}

/// Solver diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub num_equations: usize,
    pub num_constrained: usize,
    pub thickness_panels: usize,
    /// `‖Kδ − f‖ / ‖f‖` for statics, largest eigen-residual for modal runs.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct StaticSolution {
    pub field: ResultField,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct ModalSolution {
    /// Circular frequencies in rad/s, ascending.
    pub omegas: Vec<f64>,
    /// Mass-normalized mode shapes, one field per frequency.
    pub modes: Vec<ResultField>,
    pub residuals: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl Model {
    /// Pre-integrates the section of `layup` at `options.temperature`.
    pub fn new(mesh: Mesh, layup: Layup, variant: TheoryVariant, options: SectionOptions) -> Result<Arc<Self>> {
        let section = Section::integrate(&layup, &options)?;
        Ok(Arc::new(Self {
            mesh,
            layup,
            variant,
            options,
            section,
        }))
    }

    pub fn thickness(&self) -> f64 {
        self.layup.thickness()
    }

    /// Assembled system with the simply-supported edges eliminated.
    pub fn system(&self, load: Option<&LoadSpec>, with_mass: bool) -> Result<GlobalSystem> {
        let kernel = ElementKernel::new(self.variant, &self.section);
        let dof_map = DofMap::simply_supported(&self.mesh, self.variant);
        assemble_with(&self.mesh, &kernel, load, with_mass, dof_map)
    }

    pub fn solve_static(self: &Arc<Self>, load: &LoadSpec) -> Result<StaticSolution> {
        load.validate()?;
        let system = self.system(Some(load), false)?;
        let solution = solve_static(&system)?;
        let diagnostics = self.diagnostics(&system, solution.residual, 1);
        let field = ResultField::new(Arc::clone(self), &system.dof_map, &solution.delta, Some(*load))?;
        Ok(StaticSolution { field, diagnostics })
    }

    pub fn solve_modes(self: &Arc<Self>, count: usize, opts: &EigenOptions) -> Result<ModalSolution> {
        let system = self.system(None, true)?;
        let result = solve_modes(&system, count, opts)?;
        let worst = result.residuals.iter().copied().fold(0.0, f64::max);
        let diagnostics = self.diagnostics(&system, worst, result.iterations);
        let modes = (0..result.omegas.len())
            .map(|c| {
                let phi = result.vectors.column(c).into_owned();
                ResultField::new(Arc::clone(self), &system.dof_map, &phi, None)
            })
            .collect::<Result<_>>()?;
        Ok(ModalSolution {
            omegas: result.omegas,
            modes,
            residuals: result.residuals,
            diagnostics,
        })
    }

    fn diagnostics(&self, system: &GlobalSystem, residual: f64, iterations: usize) -> Diagnostics {
        Diagnostics {
            num_equations: system.num_equations(),
            num_constrained: system.dof_map.num_constrained(),
            thickness_panels: self.section.panels,
            residual,
            iterations,
        }
    }
}
