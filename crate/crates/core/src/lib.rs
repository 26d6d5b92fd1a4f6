//! Entangled generalized binomial states of two cavity modes: construction,
//! electric-field correlations, CHSH correlations of a dichotomic cavity
//! observable, and Monte Carlo Bell tests with finite detector efficiency.

pub mod binomial;
pub mod chsh;
pub mod cli;
pub mod entangled;
pub mod error;
pub mod field;
pub mod fock;
pub mod grid;
pub mod measurement;

pub use error::{Error, Result};
