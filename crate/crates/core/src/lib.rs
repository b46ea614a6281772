//! Stability spectra, critical lengths and bifurcation branches of
//! constant-mean-curvature cylinders bounded by a plane (planar strip) or
//! lying in a right wedge.
//!
//! The crate is split along the numerical pipeline:
//!
//! * [`geometry`]: configurations, grids, normal graphs, discrete mean
//!   curvature, the Jacobi operator and the index form.
//! * [`spectrum`]: closed-form eigenvalues, stability verdicts, critical
//!   lengths and bifurcation periods.
//! * [`oracle`]: independent eigensolvers used to check the closed forms.
//! * [`bifurcation`]: bifurcation points, branch switching and
//!   pseudo-arclength continuation of the non-rotational branch.

pub mod banded;
pub mod bifurcation;
mod error;
pub mod geometry;
pub mod oracle;
mod scalar;
pub mod spectrum;

pub use error::{CmcError, Result};
