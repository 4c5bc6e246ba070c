//! Exact computational homological algebra over graded-commutative algebras.

pub mod algebra;
pub mod bar;
pub mod complex;
pub mod duality;
pub mod error;
pub mod field;
pub mod koszul;
pub mod linalg;
pub mod module;
pub mod parse;
pub mod report;
pub mod resolution;
pub mod table;

pub use error::{Error, Result};
