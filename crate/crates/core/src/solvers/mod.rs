//! Static solve and free-vibration eigenproblem on an assembled system.

pub mod eigen;
pub mod skyline;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::assembly::GlobalSystem;
pub use eigen::EigenOptions;
pub use skyline::{SkylineCholesky, SkylineMatrix};

/// Relative residual `‖Kδ − f‖ / ‖f‖` accepted from a direct solve.
pub const STATIC_RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct StaticSolution {
    pub delta: DVector<f64>,
    pub residual: f64,
}

pub fn solve_static(system: &GlobalSystem) -> Result<StaticSolution> {
    let factor = system.factor_stiffness()?;
    let delta = factor.solve(&system.f);
    let fnorm = system.f.norm();
    let residual = if fnorm == 0.0 {
        0.0
    } else {
        (system.k.mul_vec(&delta) - &system.f).norm() / fnorm
    };
    if !(residual <= STATIC_RESIDUAL_LIMIT) {
        return Err(Error::Domain(format!(
            "static residual {residual:.3e} exceeds {STATIC_RESIDUAL_LIMIT:.0e}; the system is ill-conditioned"
        )));
    }
    Ok(StaticSolution { delta, residual })
}

#[derive(Debug, Clone)]
pub struct ModalResult {
    /// Circular frequencies in rad/s, ascending.
    pub omegas: Vec<f64>,
    /// M-orthonormal mode vectors as columns.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

pub fn solve_modes(system: &GlobalSystem, count: usize, opts: &EigenOptions) -> Result<ModalResult> {
    let m = system
        .m
        .as_ref()
        .ok_or_else(|| Error::Domain("modal analysis needs an assembled mass matrix".into()))?;
    let factor = system.factor_stiffness()?;
    let pairs = eigen::lowest_modes(&system.k, &factor, m, count, opts)?;
    if let Some(bad) = pairs.values.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::Domain(format!("non-positive eigenvalue {bad:.3e}")));
    }
    Ok(ModalResult {
        omegas: pairs.values.iter().map(|l| l.sqrt()).collect(),
        vectors: pairs.vectors,
        residuals: pairs.residuals,
        iterations: pairs.iterations,
    })
}
