//! Explicit periodic-orbit eigenvalues for regular scaling quantum graphs.
//!
//! The crate covers the whole pipeline for linear scaling chains: building the
//! secular trigonometric polynomial ([`graph_model`]), locating roots between
//! separators ([`spectral`]), enumerating prime periodic orbits of the step
//! graph ([`orbits`]), summing the explicit orbit expansion for individual
//! eigenvalues ([`explicit`]), and driving reproducible experiments
//! ([`harness`]).

pub mod error;
pub mod explicit;
pub mod graph_model;
pub mod harness;
pub mod numerics;
pub mod orbits;
pub mod spectral;

pub use error::{Error, Result};
