//! Quantum CSS codes from sheaves on cubical and simplicial complexes.
//!
//! The crate builds labelled cubical complexes and simplicial complexes,
//! attaches sheaves generated by local codes on codimension-one cells, and
//! extracts CSS codes from the resulting cochain complexes. Cup products and
//! the explicit cubical intersection forms give trilinear forms whose
//! invariance on cohomology classes makes a CCZ code; the `ccz` module
//! certifies that property and bounds the number of logical gates.

pub mod ccz;
pub mod chain;
pub mod complex;
pub mod cup;
pub mod duality;
pub mod error;
pub mod fixtures;
pub mod gf;
pub mod localcode;
pub mod sheaf;

pub use error::{Error, Result};
