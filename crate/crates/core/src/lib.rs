//! Drinfeld centers of spherical fusion categories from skeletal data.
//!
//! The pipeline builds the tube algebra of a fusion category, splits its
//! center into minimal idempotents and reads off the modular data of the
//! center. A quantum double of a finite group serves as an independent
//! oracle for categories of graded vector spaces.

pub mod algebra;
pub mod catalog;
pub mod center;
pub mod cli;
pub mod error;
pub mod fusion;
pub mod group_double;
pub mod halfbraiding;
pub mod linalg;
pub mod morphism;
pub mod report;
pub mod scalar;
pub mod tube;

pub use error::{Error, Result};
pub use scalar::{Tolerance, C64};
