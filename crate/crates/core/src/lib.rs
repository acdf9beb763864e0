//! Bi-free probability with amalgamation over a finite-dimensional algebra:
//! bi-non-crossing partitions, their incidence algebra, operator-valued
//! bi-moment and bi-cumulant functions, LR diagrams, and a concrete
//! operator model built on reduced free products of B-B-bimodules.

pub mod base_algebra;
pub mod bnc_core;
pub mod error;
pub mod incidence;
pub mod lr_diagrams;
pub mod moment_cumulant;
pub mod operator_model;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::Q;
