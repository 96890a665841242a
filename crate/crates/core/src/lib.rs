//! Frequency-only subword tokenization.
//!
//! Words are placed on the leaves of an n-ary Huffman tree built from corpus
//! frequencies; the branch indices on the path to a leaf become the word's
//! code, and each code symbol is rendered as one Unicode scalar so that an
//! NMT system sees a closed vocabulary of `n` symbols plus a word separator.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only the algorithms:
//!
//! - [`corpus`]: word tokenization, truecasing, frequency tables, seeded splits
//! - [`hufftree`]: tree construction and the word ↔ code mapping
//! - [`codec`]: symbol alphabet, line encoder and decoder
//! - [`baselines`]: top-k word vocabulary and a small BPE learner/segmenter
//! - [`analysis`]: symbols-per-token histograms, OOV rates, report comparison
//!
//! File formats, streaming IO and the command line live in the `hufftok`
//! crate.
//!
//! ```
//! use hufftok_core::corpus::{count_frequencies, tokenize_words};
//! use hufftok_core::hufftree::build_tree;
//! use hufftok_core::codec::{decode_line, encode_line, SymbolAlphabet};
//!
//! let tokens = tokenize_words("the house is on the hill , the house is blue .");
//! let freqs = count_frequencies([&tokens]);
//! let mapping = build_tree(&freqs, 3).unwrap().assign_codes();
//! let alphabet = SymbolAlphabet::with_defaults(3).unwrap();
//!
//! let encoded = encode_line(&tokens, &mapping, &alphabet);
//! let decoded = decode_line(&encoded.to_string(), &mapping, &alphabet);
//! assert_eq!(decoded.tokens, tokens);
//! ```
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod baselines;
pub mod codec;
pub mod corpus;
pub mod hufftree;

pub use analysis::TokenizationReport;
pub use baselines::{MergeList, TopKVocab};
pub use codec::{EncodedLine, SymbolAlphabet};
pub use corpus::{FrequencyTable, SplitSpec, TruecaseModel};
pub use hufftree::{CodeMapping, HuffmanTree};
