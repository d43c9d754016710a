//! Generalized Zernike circle functions, their transforms and expansions,
//! diffraction and acoustic fields, and coefficient fitting.

pub mod anz;
pub mod enz;
pub mod error;
pub mod expand;
pub mod grid;
pub mod inverse;
pub mod quadrature;
pub mod specfun;
pub mod transforms;
pub mod zernike;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
