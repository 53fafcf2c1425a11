//! Axisymmetric finite-strain elasto-plasticity in cylindrical coordinates.

pub mod app_cli;
pub mod cylgeo;
pub mod error;
pub mod fem_axisym;
pub mod kinematics;
pub mod material_mcc;
pub mod oracles;
pub mod tensor;

pub use error::{AxiError, Result};
