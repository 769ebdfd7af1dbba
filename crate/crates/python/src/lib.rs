//! Python bindings: run a JSON config or a validation suite and get the
//! report back as JSON text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cntsandwich::batch::{self, AnalysisConfig};
use cntsandwich::materials::MaterialLibrary;
use cntsandwich::Error;

/// Runs one analysis described by `config` (JSON text) and returns the
/// report as pretty-printed JSON.
pub fn run_json(config: &str) -> Result<String, Error> {
    let config = AnalysisConfig::from_json(config)?;
    let outcome = batch::run(&config, &MaterialLibrary::builtin())?;
    Ok(serde_json::to_string_pretty(&outcome.report)?)
}

/// Runs a bundled validation suite and returns its rows as JSON.
pub fn validate_json(suite: &str) -> Result<(bool, String), Error> {
    let report = batch::validate(suite, &MaterialLibrary::builtin())?;
    Ok((report.passed(), serde_json::to_string_pretty(&report)?))
}

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Unknown { .. } | Error::Json(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// run(config_json) -> report_json
#[pyfunction]
fn run(py: Python<'_>, config_json: &str) -> PyResult<String> {
    py.detach(|| run_json(config_json)).map_err(to_py)
}

/// validate(suite) -> (passed, report_json)
#[pyfunction]
fn validate(py: Python<'_>, suite: &str) -> PyResult<(bool, String)> {
    py.detach(|| validate_json(suite)).map_err(to_py)
}

/// Names of the bundled validation suites.
#[pyfunction]
fn suites() -> Vec<&'static str> {
    batch::SUITES.to_vec()
}

#[pymodule]
fn cntsandwich_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
