//! Crystal lattices as periodic graphs: standard realizations, Bloch
//! acoustic speeds, integrated acoustic spectra and their inversion.

// `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod bloch;
pub mod bundled;
pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod parallel;
pub mod realization;
pub mod spectrum;
pub mod theta_inverse;

pub use error::{Result, XtalError};
