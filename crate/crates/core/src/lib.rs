//! Complex Osserman algebraic curvature tensors built from Clifford families.

pub mod catalog;
pub mod clifford;
pub mod curvature;
pub mod error;
pub mod io;
pub mod linalg;
pub mod osserman;

pub use error::{Error, Result};
