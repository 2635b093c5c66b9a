//! Numerical laboratory for quasicentral approximation in normed operator ideals:
//! symmetric norming functions, commuting tuples, the quasicentral modulus estimator,
//! weighted grid models of measures, mixed-homogeneity kernels and Fourier diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fourier;
pub mod kernels;
pub mod linalg;
pub mod measure_models;
pub mod norms;
pub mod quasicentral;
pub mod tuples;

pub use error::{Error, Result};
