//! Numerical toolkit for quantum functional inequalities.
//!
//! The crate implements σ-weighted non-commutative `L_p` norms, entropy and
//! Dirichlet functionals, quantum Markov semigroups with their reversibility
//! structure, log-Sobolev constant estimation, (reverse) hypercontractivity
//! checks, and the strong-converse bounds for quantum hypothesis testing and
//! classical-quantum channel coding that follow from them. All logarithms are
//! natural, so every entropy-like quantity is in nats.

// `!(x >= 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(feature = "cli")]
pub mod cli;
pub mod converse;
pub mod entropy;
pub mod error;
pub mod lsi;
pub mod operator;
pub mod optimize;
pub mod par;
pub mod rng;
pub mod semigroup;
pub mod weighted;

pub use error::{Error, Result};
