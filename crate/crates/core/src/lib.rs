//! Spatially-coupled LDPC codes with reliability-based windowed
//! bit-flipping decoding.
//!
//! * [`protograph`] builds terminated SC-LDPC parity-check matrices by full
//!   edge spreading, coupling and circulant lifting.
//! * [`wbf`] is the weighted bit-flipping engine (single- and multi-bit).
//! * [`window`] runs it over a sliding window, with partial message
//!   reservation and the partial syndrome check.
//! * [`sim`] and [`report`] drive Monte-Carlo sweeps over an AWGN channel
//!   and write CSV results.

pub mod alist;
pub mod channel;
pub mod error;
pub mod protograph;
pub mod report;
pub mod sim;
pub mod sparse;
pub mod stream;
pub mod wbf;
pub mod window;

pub use error::{Error, Result};
pub use sparse::SparseParityCheck;
