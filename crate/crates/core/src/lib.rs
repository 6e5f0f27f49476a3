//! Numerical engine for general fractional calculus with Sonin kernels.
//!
//! The crate is layered bottom-up:
//!
//! * [`special`]: gamma, Mittag-Leffler and Bessel functions.
//! * [`kernel`]: the kernel catalog, power-series kernels and their
//!   associated-kernel construction, Laplace transforms.
//! * [`quadrature`]: graded meshes, sampled functions and the
//!   weakly singular convolution that every operator is built on.
//! * [`operators`]: the general fractional integral and derivatives,
//!   including the 1st level derivative and its projector.
//! * [`verify`]: executable residual checks of the identities the
//!   operators are expected to satisfy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernel;
pub mod operators;
pub mod quadrature;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
