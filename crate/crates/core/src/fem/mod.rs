//! Eight-node plate elements, through-thickness sections and global assembly.

pub mod assembly;
pub mod element;
pub mod load;
pub mod mesh;
pub mod quadrature;
pub mod section;
pub mod shape;

pub use assembly::{apply_simply_supported, assemble, DofMap, GlobalSystem};
pub use element::ElementKernel;
pub use load::LoadSpec;
pub use mesh::Mesh;
pub use section::{Section, SectionOptions};
