//! Numerical analysis of discrete-time quantum Markov semigroups `{Φⁿ}`.

pub mod channel;
pub mod error;
pub mod generators;
pub mod indices;
pub mod io;
pub mod linalg;
pub mod opsys;
pub mod spectral;
pub mod zero_error;

pub use error::{Error, Result};
