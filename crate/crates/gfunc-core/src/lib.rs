//! Numerical machinery for scalar Riemann-Hilbert problems of g-function type.
//!
//! The library evaluates the determinant representation of the bracket
//! function and its parameter derivatives on systems of loop contours
//! surrounding the main and complementary arcs of a jump contour, solves the
//! modulation equations for the branchpoints by Newton iteration, and
//! continues solutions in external parameters. The focusing-NLS jump
//! function is built in, together with synthetic polynomial fixtures and a
//! closed-form toy used as an independent oracle.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the
//! command line live in the companion `gfunc-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod contour;
pub mod continuation;
pub mod jumps;
pub mod radical;
pub mod rhp;
pub mod validation;

mod linalg;

pub use num_complex::Complex64;

/// Machine-precision-ish guard used for geometric coincidence tests,
/// always scaled by a configuration diameter before use.
pub(crate) const GEOM_EPS: f64 = 1e-12;
