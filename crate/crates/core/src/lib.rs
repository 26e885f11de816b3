//! First-order virtual element method for linear elasticity on polygonal
//! and polyhedral meshes.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid_gen;
pub mod kelvin;
pub mod loads;
pub mod mesh;
pub mod meshio;
pub mod sparse;
pub mod system;
pub mod vem;
pub mod verify;
pub mod vtk;

pub use error::{Error, Result};
