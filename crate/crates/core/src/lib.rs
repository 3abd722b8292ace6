//! Exact computer algebra for higher-level Zhu algebras A_N(V), the bimodules A_N(W),
//! the spaces Ω_N(W), and the map ρ from intertwining operators to module maps,
//! on the rank-one Heisenberg and the Virasoro vertex operator algebras.

pub mod error;
pub mod formal;
pub mod vector;
pub mod linalg;
pub mod voa;
pub mod window;
pub mod zhu;
pub mod bimodule;
pub mod intertwiner;
pub mod sample;
pub mod report;

pub use error::{Error, Result};
pub use formal::Scalar;
pub use vector::{BasisVector, GradedVector, Generator};
pub use voa::{Module, Voa};
