//! Triviality certificates and explicit constructions for null Lagrangian measures
//! supported on linear subspaces of matrices.

pub mod algebra;
pub mod certify;
pub mod conslaw;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod measures;
pub mod subspace;

pub use algebra::{Rational, RationalMatrix};
pub use error::{Error, Result};
pub use measures::{DiscreteMeasure, FloatMeasure};
pub use subspace::Subspace;
