//! Explicit variational integrator for hyperelastic solids and barotropic
//! fluids on regular 2D and 3D lattices, coupled by penalty contact.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod diagnostics;
pub mod dim;
pub mod error;
pub mod integrator;
pub mod kinematics;
pub mod materials;
pub mod mesh;
pub mod output;
pub mod run;
pub mod scenario;
pub mod verify;

pub use dim::{Dim, Lattice, Matrix, Vector};
pub use error::{Error, Result};
