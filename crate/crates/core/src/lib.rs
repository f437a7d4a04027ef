//! Numerical toolkit for two-dimensional soap-film-like sets: minimal cone
//! catalog and validator, density and Hausdorff-measure estimation on sampled
//! sets, cone-fitting beta numbers and point classification, one-dimensional
//! Steiner networks and retractions, a multiscale tracer for one-dimensional
//! structures, harmonic-extension comparison on spherical arcs, and
//! Federer–Fleming projection onto dyadic skeletons.

// `!(x > 0.0)` is how parameter checks reject NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cone;
pub mod error;
pub mod ff;
pub mod fit;
pub mod geometry;
pub mod harmonic;
pub mod measure;
pub mod spatial;
pub mod steiner;
pub mod synth;
pub mod tolerance;
pub mod trace;

pub use error::{Error, Result};
