pub mod assembly;
pub mod dense;
pub mod eigsolve;
pub mod error;
pub mod geom;
pub mod mesh;
pub mod polyspace;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
