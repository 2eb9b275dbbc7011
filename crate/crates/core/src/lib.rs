//! Scattered linearized polynomials over finite fields: scatteredness checks,
//! stabilizers in GL(2, q^n), standard forms, rank-metric codes and the
//! associated translation planes.

pub mod arith;
pub mod error;
pub mod families;
pub mod field;
pub mod fplinalg;
pub mod fpoly;
pub mod fqlinalg;
pub mod linearized;
pub mod mrd;
pub mod plane;
pub mod mat2;
pub mod scatter;
pub mod selftest;
pub mod stabilizer;
pub mod standard_form;

pub use error::{Error, Result};
pub use field::{ElementFormat, Fe, FieldSpec, FieldTower};
pub use linearized::{DeltaProfile, LinearizedPoly};
