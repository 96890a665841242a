//! Comparison tokenizers: a most-frequent-words vocabulary and a minimal
//! byte-pair-encoding learner and segmenter.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use hashbrown::{HashMap, HashSet};

use crate::codec::{CodecError, EncodeStats, EncodedLine, SymbolAlphabet};
use crate::corpus::FrequencyTable;
use crate::hufftree::Symbol;

/// Word-initial boundary marker (U+2581).
pub const DEFAULT_MARKER: char = '\u{2581}';

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineError {
    /// `k` must be at least 1.
    ZeroK,
    DuplicateWord(String),
    EmptyWord,
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::ZeroK => f.write_str("top-k vocabulary needs k >= 1"),
            BaselineError::DuplicateWord(w) => write!(f, "word {w:?} is listed twice"),
            BaselineError::EmptyWord => f.write_str("empty word in vocabulary"),
        }
    }
}

impl core::error::Error for BaselineError {}

/// The `k` most frequent word types, each encoded as a single symbol whose
/// index is the word's rank (0 = most frequent).
#[derive(Debug, Clone)]
pub struct TopKVocab {
    k: usize,
    words: Vec<String>,
    rank: HashMap<String, Symbol>,
}

impl PartialEq for TopKVocab {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.words == other.words
    }
}

impl Eq for TopKVocab {}

/// Keeps the `k` highest-count types of `freqs`, ties broken
/// lexicographically. For a joint vocabulary pass
/// [`FrequencyTable::combine`] of both sides.
pub fn build_topk(freqs: &FrequencyTable, k: usize) -> Result<TopKVocab, BaselineError> {
    if k == 0 {
        return Err(BaselineError::ZeroK);
    }
    TopKVocab::from_ranked(k, freqs.iter().take(k).map(|(w, _)| w.to_owned()).collect())
}

impl TopKVocab {
    /// Rebuilds a vocabulary from words listed in rank order.
    pub fn from_ranked(k: usize, words: Vec<String>) -> Result<Self, BaselineError> {
        if k == 0 {
            return Err(BaselineError::ZeroK);
        }
        let mut rank = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(BaselineError::EmptyWord);
            }
            if rank.insert(w.clone(), i as Symbol).is_some() {
                return Err(BaselineError::DuplicateWord(w.clone()));
            }
        }
        Ok(TopKVocab { k, words, rank })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Words in rank order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn rank(&self, word: &str) -> Option<Symbol> {
        self.rank.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.rank.contains_key(word)
    }
}

/// Encodes a sentence with the top-k vocabulary: one symbol per known word,
/// the unknown marker for everything else.
pub fn topk_encode<T: AsRef<str>>(
    tokens: &[T],
    vocab: &TopKVocab,
    alphabet: &SymbolAlphabet,
) -> Result<(EncodedLine, EncodeStats), CodecError> {
    if alphabet.n() < vocab.len() {
        return Err(CodecError::AlphabetTooSmall {
            needed: vocab.len(),
            available: alphabet.n(),
        });
    }
    let mut line = EncodedLine::default();
    let mut stats = EncodeStats {
        lines: 1,
        ..EncodeStats::default()
    };
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            line.push(alphabet.separator());
        }
        stats.tokens += 1;
        match vocab.rank(tok.as_ref()) {
            Some(r) => line.push(alphabet.symbol(r)?),
            None => {
                stats.oov_tokens += 1;
                line.push(alphabet.unknown());
            }
        }
    }
    Ok((line, stats))
}

/// Ordered BPE merges. Each merge replaces adjacent `(left, right)` by the
/// symbol `left + right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeList {
    merges: Vec<(String, String)>,
    marker: char,
}

impl MergeList {
    pub fn new(merges: Vec<(String, String)>, marker: char) -> Self {
        MergeList { merges, marker }
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn marker(&self) -> char {
        self.marker
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    pub fn segmenter(&self) -> BpeSegmenter {
        BpeSegmenter::new(self)
    }

    /// `initial` plus every merge output.
    pub fn vocabulary(&self, initial: &BTreeSet<String>) -> BTreeSet<String> {
        let mut vocab = initial.clone();
        for (l, r) in &self.merges {
            let mut s = l.clone();
            s.push_str(r);
            vocab.insert(s);
        }
        vocab
    }
}

/// The marker plus every character of every word: the symbol set BPE
/// learning starts from.
pub fn initial_alphabet(freqs: &FrequencyTable, marker: char) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    set.insert(marker.into());
    for (w, _) in freqs.iter() {
        for c in w.chars() {
            set.insert(c.into());
        }
    }
    set
}

fn initial_symbols(word: &str, marker: char) -> impl Iterator<Item = char> + '_ {
    core::iter::once(marker).chain(word.chars())
}

/// Replaces every non-overlapping occurrence of `pair`, scanning left to
/// right. Returns whether anything changed.
fn merge_pair(symbols: &mut Vec<u32>, pair: (u32, u32), merged: u32) -> bool {
    let mut out = 0;
    let mut i = 0;
    let mut changed = false;
    while i < symbols.len() {
        if i + 1 < symbols.len() && (symbols[i], symbols[i + 1]) == pair {
            symbols[out] = merged;
            i += 2;
            changed = true;
        } else {
            symbols[out] = symbols[i];
            i += 1;
        }
        out += 1;
    }
    symbols.truncate(out);
    changed
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Rc<str>, u32>,
    names: Vec<Rc<str>>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        let rc: Rc<str> = Rc::from(s);
        self.names.push(rc.clone());
        self.ids.insert(rc, id);
        id
    }

    fn name(&self, id: u32) -> &Rc<str> {
        &self.names[id as usize]
    }
}

type HeapEntry = (u64, Reverse<(Rc<str>, Rc<str>)>, Reverse<(u32, u32)>);

/// Learns up to `num_merges` merges from word frequencies.
///
/// Words start as `marker` followed by their characters. Each step merges
/// the adjacent pair with the highest frequency-weighted count (overlapping
/// occurrences all count), ties going to the lexicographically smallest
/// `(left, right)`. Learning stops early once no adjacent pair remains.
pub fn bpe_learn(freqs: &FrequencyTable, num_merges: usize, marker: char) -> MergeList {
    let mut interner = Interner::default();
    let mut buf = [0u8; 4];
    let mut words: Vec<Vec<u32>> = Vec::with_capacity(freqs.len());
    let mut weights: Vec<u64> = Vec::with_capacity(freqs.len());
    for (w, c) in freqs.iter() {
        words.push(
            initial_symbols(w, marker)
                .map(|ch| interner.intern(ch.encode_utf8(&mut buf)))
                .collect(),
        );
        weights.push(c);
    }

    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut occurs: HashMap<(u32, u32), HashSet<u32>> = HashMap::new();
    for (wi, syms) in words.iter().enumerate() {
        for p in syms.windows(2) {
            let pair = (p[0], p[1]);
            *counts.entry(pair).or_default() += weights[wi];
            occurs.entry(pair).or_default().insert(wi as u32);
        }
    }

    let entry = |interner: &Interner, pair: (u32, u32), count: u64| -> HeapEntry {
        (
            count,
            Reverse((interner.name(pair.0).clone(), interner.name(pair.1).clone())),
            Reverse(pair),
        )
    };
    let mut heap: BinaryHeap<HeapEntry> = counts
        .iter()
        .map(|(&pair, &c)| entry(&interner, pair, c))
        .collect();

    let mut merges = Vec::with_capacity(num_merges);
    let mut touched: HashSet<(u32, u32)> = HashSet::new();
    while merges.len() < num_merges {
        let Some((count, Reverse((left, right)), Reverse(pair))) = heap.pop() else {
            break;
        };
        if count == 0 || counts.get(&pair) != Some(&count) {
            continue; // stale
        }
        let mut joined = String::with_capacity(left.len() + right.len());
        joined.push_str(&left);
        joined.push_str(&right);
        let merged = interner.intern(&joined);
        merges.push((String::from(&*left), String::from(&*right)));

        let mut affected: Vec<u32> = occurs.remove(&pair).unwrap_or_default().into_iter().collect();
        affected.sort_unstable();
        touched.clear();
        for wi in affected {
            let syms = &mut words[wi as usize];
            if !syms.windows(2).any(|p| (p[0], p[1]) == pair) {
                continue;
            }
            let weight = weights[wi as usize];
            for p in syms.windows(2) {
                let key = (p[0], p[1]);
                *counts.get_mut(&key).expect("counted pair") -= weight;
                touched.insert(key);
            }
            merge_pair(syms, pair, merged);
            for p in syms.windows(2) {
                let key = (p[0], p[1]);
                *counts.entry(key).or_default() += weight;
                occurs.entry(key).or_default().insert(wi);
                touched.insert(key);
            }
        }
        for &key in &touched {
            let c = counts[&key];
            if c > 0 {
                heap.push(entry(&interner, key, c));
            }
        }
    }
    MergeList { merges, marker }
}

/// Applies a [`MergeList`] to single words.
#[derive(Debug, Clone)]
pub struct BpeSegmenter {
    marker: char,
    symbols: HashMap<String, u32>,
    names: Vec<String>,
    /// pair -> (rank, merged symbol)
    ranks: HashMap<(u32, u32), (usize, u32)>,
}

impl BpeSegmenter {
    pub fn new(merges: &MergeList) -> Self {
        let mut seg = BpeSegmenter {
            marker: merges.marker,
            symbols: HashMap::new(),
            names: Vec::new(),
            ranks: HashMap::with_capacity(merges.len()),
        };
        for (rank, (l, r)) in merges.merges.iter().enumerate() {
            let li = seg.intern(l);
            let ri = seg.intern(r);
            let mut joined = l.clone();
            joined.push_str(r);
            let mi = seg.intern(&joined);
            // a repeated pair can never fire again after its first rank
            seg.ranks.entry((li, ri)).or_insert((rank, mi));
        }
        seg
    }

    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.symbols.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(s.to_owned());
        self.symbols.insert(s.to_owned(), id);
        id
    }

    /// Segments `word`, starting from the marker and its characters and
    /// applying the merges in learned order, each left to right and without
    /// overlap.
    pub fn segment(&self, word: &str) -> Vec<String> {
        let mut local: Vec<String> = Vec::new();
        let base = self.names.len() as u32;
        let mut buf = [0u8; 4];
        let mut syms: Vec<u32> = initial_symbols(word, self.marker)
            .map(|c| {
                let s = c.encode_utf8(&mut buf);
                self.symbols.get(&*s).copied().unwrap_or_else(|| {
                    local.push((*s).to_owned());
                    base + local.len() as u32 - 1
                })
            })
            .collect();
        let mut next_rank = 0usize;
        loop {
            let best = syms
                .windows(2)
                .filter_map(|p| self.ranks.get(&(p[0], p[1])).map(|&(r, m)| (r, (p[0], p[1]), m)))
                .filter(|&(r, _, _)| r >= next_rank)
                .min_by_key(|&(r, _, _)| r);
            let Some((rank, pair, merged)) = best else {
                break;
            };
            merge_pair(&mut syms, pair, merged);
            next_rank = rank + 1;
        }
        syms.into_iter()
            .map(|id| match id.checked_sub(base) {
                Some(i) => local[i as usize].clone(),
                None => self.names[id as usize].clone(),
            })
            .collect()
    }
}

/// One-off segmentation; build a [`BpeSegmenter`] to segment many words.
pub fn bpe_segment(word: &str, merges: &MergeList) -> Vec<String> {
    merges.segmenter().segment(word)
}
