//! Exact solutions of the defocusing NLS equation on the half-line with
//! time-periodic boundary data: spectral admissibility tests and the
//! pole-only Riemann-Hilbert dressing construction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod boundary;
pub mod cli;
pub mod closedform;
pub mod dressing;
pub mod error;
pub mod lattice;
pub mod monodromy;
pub mod pipeline;
pub mod quadrature;
pub mod scalar_rh;
pub mod spectral;
pub mod verify;

pub use boundary::{Mode, PairKind, PeriodicPair};
pub use error::{Error, Result};
pub use monodromy::{monodromy, vb_matrix, Mat2, Monodromy};
