//! Twisted B-splines on the plane.
//!
//! The twisted B-spline of order `n` is the `n`-fold twisted convolution of the
//! indicator of the unit square. This crate evaluates these functions, their
//! Weyl kernels and Gramians, the lattice sums attached to them, and a
//! nonstationary twisted multiresolution analysis built from the first order
//! spline.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// Float math comes from `num_traits::Float`. Once std is anywhere in the
// dependency graph (tests, std consumers) its inherent methods shadow the
// trait and the imports look unused.
#![allow(unused_imports)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod gram;
pub mod latticesums;
pub mod mra;
pub mod quad;
pub mod report;
pub mod specfun;
pub mod splines;
pub mod twistops;
pub mod weyl;

pub use error::Error;
pub use num_complex::Complex64;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
