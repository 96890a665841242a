//! Symbols-per-token statistics for Huffman, top-k and BPE tokenizations.
//!
//! Histograms are token-weighted: every word type adds its corpus frequency
//! to the bucket of its segment count.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::baselines::{MergeList, TopKVocab};
use crate::codec::ratio;
use crate::corpus::FrequencyTable;
use crate::hufftree::CodeMapping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TokenizerKind {
    Huffman,
    Bpe,
    Topk,
}

impl TokenizerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TokenizerKind::Huffman => "huffman",
            TokenizerKind::Bpe => "bpe",
            TokenizerKind::Topk => "topk",
        }
    }
}

impl fmt::Display for TokenizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const HUFFMAN_BUCKETS: &str = "code length in symbols";
pub const TOPK_BUCKETS: &str = "one symbol per in-vocabulary token";
pub const BPE_BUCKETS: &str =
    "subwords per word; a standalone boundary marker is folded into the next subword";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TokenizationReport {
    pub tokenizer: TokenizerKind,
    /// Symbol count for Huffman, `k` for top-k, number of merges for BPE.
    pub vocab_size: usize,
    /// Which corpus (slice) the frequencies came from.
    pub corpus: String,
    pub bucket_rule: String,
    /// Segments per token -> token occurrences.
    pub histogram: BTreeMap<usize, u64>,
    pub total_tokens: u64,
    pub oov_tokens: u64,
    pub oov_rate: f64,
    pub weighted_path_length: u64,
    pub max_code_length: usize,
    pub single_symbol_fraction: f64,
}

impl TokenizationReport {
    fn from_buckets<I>(tokenizer: TokenizerKind, vocab_size: usize, bucket_rule: &str, items: I) -> Self
    where
        I: IntoIterator<Item = (Option<usize>, u64)>,
    {
        let mut histogram = BTreeMap::new();
        let mut total_tokens = 0;
        let mut oov_tokens = 0;
        for (bucket, count) in items {
            total_tokens += count;
            match bucket {
                Some(b) => *histogram.entry(b).or_insert(0) += count,
                None => oov_tokens += count,
            }
        }
        let weighted_path_length = histogram.iter().map(|(&b, &c)| b as u64 * c).sum();
        let max_code_length = histogram.keys().next_back().copied().unwrap_or(0);
        let single = histogram.get(&1).copied().unwrap_or(0);
        TokenizationReport {
            tokenizer,
            vocab_size,
            corpus: String::new(),
            bucket_rule: bucket_rule.to_owned(),
            histogram,
            total_tokens,
            oov_tokens,
            oov_rate: ratio(oov_tokens, total_tokens),
            weighted_path_length,
            max_code_length,
            single_symbol_fraction: ratio(single, total_tokens),
        }
    }

    /// Labels the corpus slice the report was computed on.
    pub fn with_corpus(mut self, corpus: impl Into<String>) -> Self {
        self.corpus = corpus.into();
        self
    }

    /// `tokenizer-vocab_size`, e.g. `huffman-32000`.
    pub fn label(&self) -> String {
        alloc::format!("{}-{}", self.tokenizer, self.vocab_size)
    }

    /// Tokens falling in `bucket`, as a fraction of all tokens.
    pub fn bucket_fraction(&self, bucket: usize) -> f64 {
        ratio(self.histogram.get(&bucket).copied().unwrap_or(0), self.total_tokens)
    }
}

/// Buckets each word type of `freqs` by its code length; types without a
/// code count as OOV.
pub fn histogram_for_mapping(mapping: &CodeMapping, freqs: &FrequencyTable) -> TokenizationReport {
    TokenizationReport::from_buckets(
        TokenizerKind::Huffman,
        mapping.n(),
        HUFFMAN_BUCKETS,
        freqs.iter().map(|(w, c)| (mapping.code(w).map(<[_]>::len), c)),
    )
}

pub fn histogram_for_topk(vocab: &TopKVocab, freqs: &FrequencyTable) -> TokenizationReport {
    TokenizationReport::from_buckets(
        TokenizerKind::Topk,
        vocab.k(),
        TOPK_BUCKETS,
        freqs.iter().map(|(w, c)| (vocab.contains(w).then_some(1), c)),
    )
}

/// Number of BPE units for one word, counting a standalone boundary marker
/// together with the subword after it.
pub fn bpe_units(subwords: &[String], marker: char) -> usize {
    let mut buf = [0u8; 4];
    let marker = &*marker.encode_utf8(&mut buf);
    match subwords {
        [first, _, ..] if first == marker => subwords.len() - 1,
        _ => subwords.len(),
    }
}

pub fn histogram_for_bpe(merges: &MergeList, freqs: &FrequencyTable) -> TokenizationReport {
    let seg = merges.segmenter();
    TokenizationReport::from_buckets(
        TokenizerKind::Bpe,
        merges.len(),
        BPE_BUCKETS,
        freqs
            .iter()
            .map(|(w, c)| (Some(bpe_units(&seg.segment(w), merges.marker())), c)),
    )
}

/// Anything that can tell whether a word is representable.
pub trait Vocabulary {
    fn contains_word(&self, word: &str) -> bool;
}

impl Vocabulary for CodeMapping {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

impl Vocabulary for TopKVocab {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

/// Fraction of test tokens absent from the vocabulary.
pub fn oov_report<V: Vocabulary + ?Sized>(vocab: &V, test: &FrequencyTable) -> f64 {
    let oov: u64 = test
        .iter()
        .filter(|(w, _)| !vocab.contains_word(w))
        .map(|(_, c)| c)
        .sum();
    ratio(oov, test.total_tokens())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    NoReports,
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::NoReports => f.write_str("nothing to compare: no reports given"),
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Reports of one tokenizer family, ordered by vocabulary size.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub tokenizer: TokenizerKind,
    pub reports: Vec<TokenizationReport>,
    /// Largest bucket over all reports of the panel.
    pub max_bucket: usize,
}

/// Reports grouped into one panel per tokenizer family (Huffman, BPE,
/// top-k, in that order).
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub panels: Vec<Panel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub tokenizer: TokenizerKind,
    pub vocab_size: usize,
    pub bucket: usize,
    pub tokens: u64,
    pub fraction: f64,
}

impl Comparison {
    /// One row per (report, bucket), buckets `1..=max_bucket` of the panel.
    pub fn rows(&self) -> Vec<ComparisonRow> {
        let mut rows = Vec::new();
        for panel in &self.panels {
            for r in &panel.reports {
                for bucket in 1..=panel.max_bucket {
                    rows.push(ComparisonRow {
                        label: r.label(),
                        tokenizer: r.tokenizer,
                        vocab_size: r.vocab_size,
                        bucket,
                        tokens: r.histogram.get(&bucket).copied().unwrap_or(0),
                        fraction: r.bucket_fraction(bucket),
                    });
                }
            }
        }
        rows
    }
}

pub fn compare_report(reports: &[TokenizationReport]) -> Result<Comparison, AnalysisError> {
    if reports.is_empty() {
        return Err(AnalysisError::NoReports);
    }
    let mut by_kind: BTreeMap<TokenizerKind, Vec<TokenizationReport>> = BTreeMap::new();
    for r in reports {
        by_kind.entry(r.tokenizer).or_default().push(r.clone());
    }
    let panels = by_kind
        .into_iter()
        .map(|(tokenizer, mut reports)| {
            reports.sort_by_key(|r| r.vocab_size);
            let max_bucket = reports.iter().map(|r| r.max_code_length).max().unwrap_or(0);
            Panel {
                tokenizer,
                reports,
                max_bucket,
            }
        })
        .collect();
    Ok(Comparison { panels })
}
