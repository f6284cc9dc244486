//! Optimality-preserving translation of Rabin objectives on MDPs into
//! limit-average reward machines, with exact evaluators and learners.
//!
//! The pipeline: build the product `M ⊗ A` ([`product`]), find simple accepting
//! end components ([`components`]), synthesize a reward machine ([`translate`]),
//! check it by exhaustive policy enumeration ([`translate::certify_translation`]),
//! and learn limit-average optimal policies from samples ([`learn`]).

pub mod cli;
pub mod components;
pub mod error;
pub mod evaluate;
pub mod fixtures;
pub mod io;
pub mod learn;
pub mod model;
pub mod product;
pub mod random;
pub mod translate;

pub use error::{Error, Result};
