//! Numerical laboratory for the Fourier-side geometry of piecewise-constant
//! BV functions: exact jump products over shape catalogs, radial spectral
//! profiles and their perimeter asymptotics, short-time heat content,
//! Minkowski dilation derivatives, and quadratic discrepancy of point sets
//! under affine averaging.
//!
//! The crate is organized around a small exact-geometry core ([`geometry`]):
//! every function handled here is a finite weighted sum of box / ball /
//! polygon indicators, so jump sets, perimeters, norms and mutual overlaps
//! all have closed forms. The analysis modules ([`spectral`], [`heat`],
//! [`minkowski`], [`discrepancy`], [`inequality`]) evaluate the integral
//! functionals whose limits recover those exact quantities, which is what
//! the acceptance suite ([`verify`]) checks end to end.

pub mod error;
pub mod geometry;
pub mod quad;
pub mod special;
pub mod vec;

pub mod discrepancy;
pub mod heat;
pub mod inequality;
pub mod minkowski;
pub mod spectral;

pub mod catalog;
pub mod verify;

pub use error::{Error, Result};
