//! Random cluster and Potts models on bounded-degree expanders: exact
//! oracles, polymer-model cluster expansions, approximate counting and
//! sampling, Markov chain dynamics and tree free energies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cluster;
pub mod dynamics;
pub mod engine;
pub mod error;
pub(crate) mod esu;
pub mod exact;
pub mod graph;
pub mod logspace;
pub mod phase;
pub mod polymers;

pub use cluster::Model;
pub use error::{Error, Result};
pub use graph::{EdgeConfig, Graph};
