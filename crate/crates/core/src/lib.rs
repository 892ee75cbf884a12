//! Rate-adaptive multidimensional reconciliation with multi-edge type LDPC
//! codes: degree distributions, PEG construction, 8-dimensional mapping,
//! syndrome belief-propagation decoding, puncturing/shortening plans and a
//! Monte-Carlo harness.

pub mod decoder;
pub mod degree_dist;
mod error;
pub mod matrix;
pub mod multidim;
pub mod peg;
pub mod rate_adapt;
pub mod sim;

pub use error::{Error, Result};
