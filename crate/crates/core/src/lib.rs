//! Exact solution toolkit for an integrable spin chain with nearest-neighbour,
//! next-nearest-neighbour and chiral three-spin couplings under antiperiodic
//! boundary conditions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bae;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod spectrum;
pub mod thermo;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64 as C64;
