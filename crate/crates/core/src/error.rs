use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-physical material: {0}")]
    Material(String),

    #[error("element {element}: {reason}")]
    Element { element: usize, reason: String },

    #[error("singular system: pivot {pivot:.3e} at equation {equation} ({node_dof})")]
    Singular {
        equation: usize,
        pivot: f64,
        node_dof: String,
    },

    #[error("eigensolver did not converge after {iterations} iterations (max relative change {max_change:.3e})")]
    NoConvergence { iterations: usize, max_change: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
