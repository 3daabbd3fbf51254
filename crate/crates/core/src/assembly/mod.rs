//! Discrete space, global matrices, load vectors and norms.

pub mod dofmap;
pub mod manufactured;
pub mod norm;
pub mod system;

pub use dofmap::DgSpace;
pub use manufactured::Manufactured;
pub use norm::{dg_error, dg_norm, interior_jumps, norm_parts, ExactField, NormParts};
pub use system::{assemble_load, assemble_system, form_against_basis, AssembledSystem, AssemblyOptions, Penalty};
