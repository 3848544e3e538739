//! Knizhnik–Zamolodchikov and dynamical differential equations for Kac–Moody algebras
//! without Serre relations: exact operator construction, compatibility checks, and
//! numerically verified hypergeometric solutions.

pub mod error;
pub mod linalg;
pub mod rational;

pub mod free_kac_moody;
pub mod weight_modules;
pub mod connections;
pub mod hypergeometric;
pub mod symmetrization;
pub mod arrangements;
pub mod cli;

pub use error::{KzError, Result};
