//! Parallel two-pass MDL coding of binary tree sources.
//!
//! The input is cut into `B` blocks. Every block is counted independently,
//! one coordinator prunes the aggregated context tree down to the minimum
//! description length structure and quantizes its parameters, and every
//! block is then arithmetic-coded independently against that shared model.
//!
//! This crate is `no_std` (it needs `alloc`). Scheduling of the per-block
//! work is abstracted by [`codec::Executor`]; [`codec::Sequential`] runs it
//! inline.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod bits;
pub mod codec;
pub mod ctp;
pub mod error;
pub mod quantizer;
pub mod source;
pub mod stats;

pub use codec::{decode, decode_bytes, encode, Container, EncodeConfig, Encoded, Executor, Mode, Sequential};
pub use ctp::{LengthReport, PrunedModel};
pub use error::{ConfigError, Error, Result};
pub use quantizer::{grid_size, QuantizerGrid};
pub use source::{State, TreeSource, TreeStructure, MAX_DEPTH};
pub use stats::{BlockCounts, CountsTree};
