//! Ridgelet-transform parameter selection for single-hidden-layer networks.
//!
//! The crate covers the transform pair and its lattice reconstruction ([`lattice`]), the
//! admissibility constant ([`admissibility`]), oracle-distribution samplers ([`sampling`]),
//! importance-sampled output weights ([`importance`]), ridge readouts ([`regression`]), Adam
//! training of the full network ([`network`]) and the experiment drivers ([`experiments`]).

pub mod admissibility;
pub mod datasets;
pub mod error;
pub mod experiments;
pub mod importance;
pub mod lattice;
pub mod mnist;
pub mod network;
pub mod regression;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
