//! n-ary Huffman tree construction and the word ↔ code mapping.
//!
//! Construction follows the plain greedy procedure: a min-priority queue
//! seeded with one leaf per word type, and repeated merging of up to `n`
//! lowest-score nodes under a fresh parent until a single node remains. No
//! dummy leaves are added, so the last merge may have fewer than `n`
//! children.

use alloc::borrow::ToOwned;
use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use hashbrown::HashMap;

use crate::corpus::FrequencyTable;

/// Symbol index within a code alphabet.
pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    EmptyTable,
    /// Fewer than two coding symbols.
    BranchingFactor(usize),
    /// A word of the frequency table has no code.
    MissingWord(String),
    EmptyCode(String),
    SymbolOutOfRange { word: String, symbol: Symbol, n: usize },
    DuplicateWord(String),
    DuplicateCode(String),
    /// `prefix`'s code is a proper prefix of `word`'s.
    NotPrefixFree { prefix: String, word: String },
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::EmptyTable => f.write_str("cannot build a tree from an empty frequency table"),
            TreeError::BranchingFactor(n) => {
                write!(f, "number of symbols must be at least 2, got {n}")
            }
            TreeError::MissingWord(w) => write!(f, "word {w:?} is missing from the mapping"),
            TreeError::EmptyCode(w) => write!(f, "word {w:?} has an empty code"),
            TreeError::SymbolOutOfRange { word, symbol, n } => {
                write!(f, "code of {word:?} uses symbol {symbol}, outside [0, {n})")
            }
            TreeError::DuplicateWord(w) => write!(f, "word {w:?} is mapped twice"),
            TreeError::DuplicateCode(w) => write!(f, "code of {w:?} is assigned twice"),
            TreeError::NotPrefixFree { prefix, word } => {
                write!(f, "code of {prefix:?} is a prefix of the code of {word:?}")
            }
        }
    }
}

impl core::error::Error for TreeError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanNode {
    label: Option<String>,
    score: u64,
    seq: u64,
    children: Vec<HuffmanNode>,
}

impl HuffmanNode {
    /// Word carried by a leaf; `None` for internal nodes.
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn score(&self) -> u64 {
        self.score
    }

    /// Creation order; leaves come first in frequency-table order.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    /// Children in pop order. Child `i` carries symbol `i`.
    pub fn children(&self) -> &[HuffmanNode] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTree {
    root: HuffmanNode,
    n: usize,
}

/// Builds the tree for `freqs` with branching factor `n`.
///
/// Ties on score are broken by creation sequence: leaves are numbered in the
/// table's iteration order, and every merged node takes the next number.
pub fn build_tree(freqs: &FrequencyTable, n: usize) -> Result<HuffmanTree, TreeError> {
    if n < 2 {
        return Err(TreeError::BranchingFactor(n));
    }
    if freqs.is_empty() {
        return Err(TreeError::EmptyTable);
    }
    let mut arena: Vec<Option<HuffmanNode>> = Vec::with_capacity(freqs.len() * 2);
    let mut queue = BinaryHeap::with_capacity(freqs.len());
    for (word, count) in freqs.iter() {
        let seq = arena.len() as u64;
        arena.push(Some(HuffmanNode {
            label: Some(word.to_owned()),
            score: count,
            seq,
            children: Vec::new(),
        }));
        queue.push(Reverse((count, seq)));
    }
    while queue.len() > 1 {
        let mut children = Vec::with_capacity(n.min(queue.len()));
        let mut score = 0u64;
        while children.len() < n {
            let Some(Reverse((s, seq))) = queue.pop() else {
                break;
            };
            score += s;
            children.push(arena[seq as usize].take().expect("node popped twice"));
        }
        let seq = arena.len() as u64;
        arena.push(Some(HuffmanNode {
            label: None,
            score,
            seq,
            children,
        }));
        queue.push(Reverse((score, seq)));
    }
    let Reverse((_, root_seq)) = queue.pop().expect("queue holds the root");
    let root = arena[root_seq as usize].take().expect("root present");
    Ok(HuffmanTree { root, n })
}

impl HuffmanTree {
    pub fn root(&self) -> &HuffmanNode {
        &self.root
    }

    /// Branching factor the tree was built with.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leaf_count(&self) -> usize {
        let mut stack = vec![&self.root];
        let mut leaves = 0;
        while let Some(node) = stack.pop() {
            if node.is_leaf() {
                leaves += 1;
            }
            stack.extend(node.children.iter());
        }
        leaves
    }

    /// Length of the longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        let mut stack = vec![(&self.root, 0usize)];
        let mut deepest = 0;
        while let Some((node, d)) = stack.pop() {
            deepest = deepest.max(d);
            stack.extend(node.children.iter().map(|c| (c, d + 1)));
        }
        deepest
    }

    /// Reads codes off the tree: child `i` contributes symbol `i`. A tree made
    /// of a single leaf gives that word the code `[0]`.
    pub fn assign_codes(&self) -> CodeMapping {
        let mut found: Vec<(u64, String, Vec<Symbol>)> = Vec::new();
        let mut stack: Vec<(&HuffmanNode, Vec<Symbol>)> = vec![(&self.root, Vec::new())];
        while let Some((node, path)) = stack.pop() {
            if let Some(word) = &node.label {
                let code = if path.is_empty() { vec![0] } else { path };
                found.push((node.seq, word.clone(), code));
                continue;
            }
            for (i, child) in node.children.iter().enumerate() {
                let mut p = path.clone();
                p.push(i as Symbol);
                stack.push((child, p));
            }
        }
        found.sort_unstable_by_key(|e| e.0);
        CodeMapping::from_unchecked(self.n, found.into_iter().map(|(_, w, c)| (w, c)).collect())
    }
}

/// Bidirectional word ↔ code table over an alphabet of `n` symbols.
#[derive(Debug, Clone)]
pub struct CodeMapping {
    n: usize,
    entries: Vec<(String, Vec<Symbol>)>,
    by_word: HashMap<String, usize>,
    by_code: HashMap<Vec<Symbol>, usize>,
}

impl PartialEq for CodeMapping {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl Eq for CodeMapping {}

impl CodeMapping {
    fn from_unchecked(n: usize, entries: Vec<(String, Vec<Symbol>)>) -> Self {
        let by_word = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.0.clone(), i))
            .collect();
        let by_code = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.1.clone(), i))
            .collect();
        CodeMapping {
            n,
            entries,
            by_word,
            by_code,
        }
    }

    /// Validates and indexes externally supplied entries, e.g. from a mapping
    /// file. Entry order is kept as given.
    pub fn from_entries(n: usize, entries: Vec<(String, Vec<Symbol>)>) -> Result<Self, TreeError> {
        if n < 2 {
            return Err(TreeError::BranchingFactor(n));
        }
        for (word, code) in &entries {
            if code.is_empty() {
                return Err(TreeError::EmptyCode(word.clone()));
            }
            if let Some(&symbol) = code.iter().find(|&&s| s as usize >= n) {
                return Err(TreeError::SymbolOutOfRange {
                    word: word.clone(),
                    symbol,
                    n,
                });
            }
        }
        let mapping = Self::from_unchecked(n, entries);
        if mapping.by_word.len() != mapping.entries.len() {
            let mut seen = hashbrown::HashSet::new();
            let dup = mapping.entries.iter().find(|e| !seen.insert(&e.0)).unwrap();
            return Err(TreeError::DuplicateWord(dup.0.clone()));
        }
        if mapping.by_code.len() != mapping.entries.len() {
            let mut seen = hashbrown::HashSet::new();
            let dup = mapping.entries.iter().find(|e| !seen.insert(&e.1)).unwrap();
            return Err(TreeError::DuplicateCode(dup.0.clone()));
        }
        if let Some((prefix, word)) = mapping.prefix_violation() {
            return Err(TreeError::NotPrefixFree {
                prefix: prefix.to_owned(),
                word: word.to_owned(),
            });
        }
        Ok(mapping)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in leaf order (the frequency-table order for built mappings).
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, &[Symbol])> + '_ {
        self.entries.iter().map(|(w, c)| (w.as_str(), c.as_slice()))
    }

    pub fn code(&self, word: &str) -> Option<&[Symbol]> {
        self.by_word.get(word).map(|&i| self.entries[i].1.as_slice())
    }

    pub fn word(&self, code: &[Symbol]) -> Option<&str> {
        self.by_code.get(code).map(|&i| self.entries[i].0.as_str())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.by_word.contains_key(word)
    }

    pub fn max_code_length(&self) -> usize {
        self.entries.iter().map(|e| e.1.len()).max().unwrap_or(0)
    }

    /// First pair `(a, b)` where `a`'s code is a proper prefix of `b`'s.
    pub fn prefix_violation(&self) -> Option<(&str, &str)> {
        let mut sorted: Vec<&(String, Vec<Symbol>)> = self.entries.iter().collect();
        sorted.sort_unstable_by(|a, b| a.1.cmp(&b.1));
        // in lexicographic order a prefix sorts directly before some extension of it
        sorted
            .windows(2)
            .find(|w| w[1].1.starts_with(&w[0].1))
            .map(|w| (w[0].0.as_str(), w[1].0.as_str()))
    }

    pub fn is_prefix_free(&self) -> bool {
        self.prefix_violation().is_none()
    }

    /// Exact integer check of Σ n^(−len) ≤ 1, done level by level: every
    /// depth offers `n × (unused slots one level up)` positions.
    pub fn satisfies_kraft(&self) -> bool {
        let max = self.max_code_length();
        let mut per_length = vec![0u128; max + 1];
        for (_, code) in &self.entries {
            per_length[code.len()] += 1;
        }
        let mut remaining: u128 = self.entries.len() as u128;
        let mut available: u128 = self.n as u128;
        for &used in &per_length[1..] {
            if used > available {
                return false;
            }
            remaining -= used;
            if available - used >= remaining {
                return true;
            }
            available = (available - used).saturating_mul(self.n as u128);
        }
        true
    }

    /// Σ n^(−len) in floating point.
    pub fn kraft_sum(&self) -> f64 {
        let inv = 1.0 / self.n as f64;
        let max = self.max_code_length();
        let mut per_length = vec![0u64; max + 1];
        for (_, code) in &self.entries {
            per_length[code.len()] += 1;
        }
        let mut weight = 1.0;
        let mut sum = 0.0;
        for &count in &per_length[1..] {
            weight *= inv;
            sum += count as f64 * weight;
        }
        sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeLengthStats {
    pub max_code_length: usize,
    /// Σ frequency × code length: the number of code symbols needed for the
    /// corpus, separators excluded.
    pub weighted_path_length: u64,
}

pub fn code_length_stats(
    mapping: &CodeMapping,
    freqs: &FrequencyTable,
) -> Result<CodeLengthStats, TreeError> {
    let mut stats = CodeLengthStats {
        max_code_length: 0,
        weighted_path_length: 0,
    };
    for (word, count) in freqs.iter() {
        let code = mapping
            .code(word)
            .ok_or_else(|| TreeError::MissingWord(word.to_owned()))?;
        stats.max_code_length = stats.max_code_length.max(code.len());
        stats.weighted_path_length += count * code.len() as u64;
    }
    Ok(stats)
}
