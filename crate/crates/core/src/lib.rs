//! Finite-element analysis of sandwich plates with a homogeneous core and
//! nanotube-reinforced facesheets: static bending under pressure or
//! through-thickness temperature, and free vibration, for six plate
//! theories on eight-node serendipity elements.

pub mod analysis;
pub mod batch;
pub mod error;
pub mod fem;
pub mod layup;
pub mod materials;
pub mod postprocess;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
