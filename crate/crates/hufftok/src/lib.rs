//! File formats, streaming codec and command line for the Huffman-coding
//! subword tokenizer in [`hufftok_core`].

pub mod cli;
pub mod error;
pub mod figure;
pub mod formats;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
pub use hufftok_core as core;
