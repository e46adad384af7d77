//! Exact computations with A∞ and L∞ algebras over ℤ₂-graded vector spaces.

pub mod base;
pub mod bracket;
pub mod cli;
pub mod coalgebra;
pub mod cochain;
pub mod cohomology;
pub mod deformation;
pub mod document;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod massey;
pub mod relations;
pub mod scalar;

pub use error::{Error, Result};
