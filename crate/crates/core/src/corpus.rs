//! Corpus ingestion: word tokenization, truecasing, frequency counting and
//! deterministic train/test splits.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicode_general_category::{get_general_category, GeneralCategory};

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusError {
    /// Parallel sides have different line counts.
    Alignment { source: usize, target: usize },
    /// Split rate outside the open interval (0, 1).
    InvalidRate(f64),
    /// A frequency entry with an empty word.
    EmptyWord,
    /// A frequency entry with a zero count.
    ZeroCount(String),
    /// The same word was supplied twice.
    DuplicateWord(String),
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::Alignment { source, target } => write!(
                f,
                "alignment error: source has {source} lines but target has {target}"
            ),
            CorpusError::InvalidRate(rate) => {
                write!(f, "split rate must lie in (0, 1), got {rate}")
            }
            CorpusError::EmptyWord => f.write_str("frequency table entry with an empty word"),
            CorpusError::ZeroCount(w) => write!(f, "word {w:?} has a zero count"),
            CorpusError::DuplicateWord(w) => write!(f, "word {w:?} appears twice"),
        }
    }
}

impl core::error::Error for CorpusError {}

fn is_detachable(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Splits a sentence into word tokens.
///
/// Whitespace separates chunks; punctuation and symbol characters at either
/// edge of a chunk are detached one character at a time, while anything in
/// the interior (hyphens, apostrophes, digits, ...) stays attached.
pub fn tokenize_words(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in line.split_whitespace() {
        let mut rest = chunk;
        while let Some(c) = rest.chars().next().filter(|&c| is_detachable(c)) {
            out.push(c.to_owned_string());
            rest = &rest[c.len_utf8()..];
        }
        let mut trailing = Vec::new();
        while let Some(c) = rest.chars().next_back().filter(|&c| is_detachable(c)) {
            trailing.push(c.to_owned_string());
            rest = &rest[..rest.len() - c.len_utf8()];
        }
        if !rest.is_empty() {
            out.push(rest.to_owned());
        }
        out.extend(trailing.into_iter().rev());
    }
    out
}

trait CharExt {
    fn to_owned_string(self) -> String;
}

impl CharExt for char {
    fn to_owned_string(self) -> String {
        let mut s = String::with_capacity(self.len_utf8());
        s.push(self);
        s
    }
}

/// Canonical casing for each lowercased word type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruecaseModel {
    canonical: BTreeMap<String, String>,
}

impl TruecaseModel {
    /// Learns the most frequent non-sentence-initial surface form of every
    /// type. Types seen only sentence-initially fall back to their most
    /// frequent form overall. Ties go to the lexicographically smallest form.
    pub fn train<L, T>(lines: L) -> Self
    where
        L: IntoIterator,
        L::Item: AsRef<[T]>,
        T: AsRef<str>,
    {
        // lowercase -> surface -> (non-initial count, total count)
        let mut stats: HashMap<String, HashMap<String, (u64, u64)>> = HashMap::new();
        for line in lines {
            for (pos, tok) in line.as_ref().iter().enumerate() {
                let tok = tok.as_ref();
                let forms = stats.entry(tok.to_lowercase()).or_default();
                let slot = match forms.get_mut(tok) {
                    Some(slot) => slot,
                    None => forms.entry(tok.to_owned()).or_default(),
                };
                slot.1 += 1;
                if pos > 0 {
                    slot.0 += 1;
                }
            }
        }
        let canonical = stats
            .into_iter()
            .map(|(lower, forms)| {
                let any_non_initial = forms.values().any(|&(ni, _)| ni > 0);
                let best = forms
                    .into_iter()
                    .map(|(form, (ni, total))| (if any_non_initial { ni } else { total }, form))
                    .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
                    .map(|(_, form)| form)
                    .unwrap_or_default();
                (lower, best)
            })
            .collect();
        TruecaseModel { canonical }
    }

    /// Builds a model from explicit `(lowercase, canonical)` pairs. Pairs whose
    /// canonical form does not lowercase to the key are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        TruecaseModel {
            canonical: pairs
                .into_iter()
                .filter(|(k, v)| v.to_lowercase() == *k)
                .collect(),
        }
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.canonical.get(&word.to_lowercase()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    /// `(lowercase, canonical)` pairs in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.canonical.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Replaces the sentence-initial token with its canonical form.
    pub fn truecase(&self, mut tokens: Vec<String>) -> Vec<String> {
        self.truecase_in_place(&mut tokens);
        tokens
    }

    pub fn truecase_in_place(&self, tokens: &mut [String]) {
        if let Some(first) = tokens.first_mut() {
            if let Some(canon) = self.get(first) {
                if canon != first {
                    *first = canon.to_owned();
                }
            }
        }
    }
}

/// Word counts for one language side, ordered by decreasing count with
/// lexicographic tie-breaking. That order is the leaf insertion order of the
/// Huffman construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrequencyTable {
    entries: Vec<(String, u64)>,
    total_tokens: u64,
}

fn frequency_order(a: &(String, u64), b: &(String, u64)) -> core::cmp::Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

impl FrequencyTable {
    /// Builds a table from `(word, count)` pairs in any order.
    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(
        counts: I,
    ) -> Result<Self, CorpusError> {
        let mut entries: Vec<(String, u64)> = Vec::new();
        for (word, count) in counts {
            if word.is_empty() {
                return Err(CorpusError::EmptyWord);
            }
            if count == 0 {
                return Err(CorpusError::ZeroCount(word));
            }
            entries.push((word, count));
        }
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(CorpusError::DuplicateWord(w[0].0.clone()));
        }
        Ok(Self::from_unique(entries))
    }

    fn from_unique(mut entries: Vec<(String, u64)>) -> Self {
        entries.sort_unstable_by(frequency_order);
        let total_tokens = entries.iter().map(|e| e.1).sum();
        FrequencyTable {
            entries,
            total_tokens,
        }
    }

    /// Sums several tables, e.g. source and target sides for a joint vocabulary.
    pub fn combine<'a, I: IntoIterator<Item = &'a FrequencyTable>>(tables: I) -> Self {
        let mut counter = FrequencyCounter::default();
        for t in tables {
            for (w, c) in t.iter() {
                counter.add_count(w, c);
            }
        }
        counter.finish()
    }

    /// Entries in table order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, u64)> + '_ {
        self.entries.iter().map(|(w, c)| (w.as_str(), *c))
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    /// Number of word types.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Linear lookup; intended for tests and small tables.
    pub fn get(&self, word: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.0 == word).map(|e| e.1)
    }
}

/// Mutable accumulator behind [`count_frequencies`]. Counters built over
/// disjoint chunks of a corpus can be merged in any order; `finish` sorts,
/// so the resulting table does not depend on the merge order.
#[derive(Debug, Clone, Default)]
pub struct FrequencyCounter {
    counts: HashMap<String, u64>,
}

impl FrequencyCounter {
    pub fn add(&mut self, token: &str) {
        self.add_count(token, 1);
    }

    pub fn add_count(&mut self, token: &str, count: u64) {
        if token.is_empty() || count == 0 {
            return;
        }
        match self.counts.get_mut(token) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(token.to_owned(), count);
            }
        }
    }

    pub fn add_tokens<T: AsRef<str>>(&mut self, tokens: &[T]) {
        for t in tokens {
            self.add(t.as_ref());
        }
    }

    pub fn merge(&mut self, other: FrequencyCounter) {
        if self.counts.len() < other.counts.len() {
            let mine = core::mem::replace(&mut self.counts, other.counts);
            for (w, c) in mine {
                *self.counts.entry(w).or_default() += c;
            }
        } else {
            for (w, c) in other.counts {
                *self.counts.entry(w).or_default() += c;
            }
        }
    }

    pub fn finish(self) -> FrequencyTable {
        FrequencyTable::from_unique(self.counts.into_iter().collect())
    }
}

/// Counts token occurrences over tokenized lines.
pub fn count_frequencies<L, T>(lines: L) -> FrequencyTable
where
    L: IntoIterator,
    L::Item: AsRef<[T]>,
    T: AsRef<str>,
{
    let mut counter = FrequencyCounter::default();
    for line in lines {
        counter.add_tokens(line.as_ref());
    }
    counter.finish()
}

/// Test-set sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitSpec {
    rate: f64,
    seed: u64,
}

impl SplitSpec {
    pub fn new(rate: f64, seed: u64) -> Result<Self, CorpusError> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(CorpusError::InvalidRate(rate));
        }
        Ok(SplitSpec { rate, seed })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `round(rate × total)`, half away from zero.
    pub fn test_count(&self, total: usize) -> usize {
        let exact = self.rate * total as f64 + 0.5;
        (exact as usize).min(total)
    }
}

/// Line indices of a split, both ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Chooses `spec.test_count(total)` test indices with a seeded Fisher-Yates
/// shuffle of `0..total`.
pub fn split_indices(total: usize, spec: &SplitSpec) -> SplitIndices {
    let mut order: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for i in (1..total).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let k = spec.test_count(total);
    let mut test = order[..k].to_vec();
    let mut train = order[k..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    SplitIndices { train, test }
}

/// Aligned source/target lines of one side of a split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelLines<T> {
    pub source: Vec<T>,
    pub target: Vec<T>,
}

/// Splits a parallel corpus into `(train, test)`, keeping lines aligned and
/// in their original relative order.
pub fn split_corpus<T: Clone>(
    source: &[T],
    target: &[T],
    spec: &SplitSpec,
) -> Result<(ParallelLines<T>, ParallelLines<T>), CorpusError> {
    if source.len() != target.len() {
        return Err(CorpusError::Alignment {
            source: source.len(),
            target: target.len(),
        });
    }
    let idx = split_indices(source.len(), spec);
    let pick = |ids: &[usize]| ParallelLines {
        source: ids.iter().map(|&i| source[i].clone()).collect(),
        target: ids.iter().map(|&i| target[i].clone()).collect(),
    };
    Ok((pick(&idx.train), pick(&idx.test)))
}
