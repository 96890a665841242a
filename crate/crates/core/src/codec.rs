//! Rendering of code symbols as Unicode scalars, and the line encoder and
//! decoder.
//!
//! An encoded line is a sequence of single-character units separated by one
//! ASCII space. A unit is a code symbol, the word separator, or the unknown
//! marker. Decoding groups units into runs between separators and looks each
//! run up in the mapping; runs that are not codewords are skipped and
//! counted, never reported as errors.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::hufftree::{CodeMapping, Symbol};

pub const DEFAULT_BASE: u32 = 0x4E00;
pub const DEFAULT_SEPARATOR: char = '\u{2420}';
pub const DEFAULT_UNKNOWN: char = '\u{FFFD}';

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    EmptyAlphabet,
    /// `base + i` is not a usable scalar (surrogate, out of range, whitespace
    /// or control).
    UnusableCodepoint(u32),
    /// Separator or unknown marker is a symbol, whitespace, a control
    /// character, or the two coincide.
    ReservedCollision(char),
    SymbolOutOfRange { symbol: Symbol, n: usize },
    /// A code table needs more symbols than the alphabet has.
    AlphabetTooSmall { needed: usize, available: usize },
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecError::EmptyAlphabet => f.write_str("alphabet must have at least one symbol"),
            CodecError::UnusableCodepoint(cp) => {
                write!(f, "code point U+{cp:04X} cannot be used as a symbol")
            }
            CodecError::ReservedCollision(c) => write!(
                f,
                "reserved character U+{:04X} collides with the symbol range or is not printable",
                *c as u32
            ),
            CodecError::SymbolOutOfRange { symbol, n } => {
                write!(f, "symbol index {symbol} is outside [0, {n})")
            }
            CodecError::AlphabetTooSmall { needed, available } => write!(
                f,
                "alphabet has {available} symbols but {needed} are needed"
            ),
        }
    }
}

impl core::error::Error for CodecError {}

/// `n` symbols rendered as the contiguous scalars `base .. base + n`, plus a
/// word separator and an unknown-word marker outside that range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolAlphabet {
    n: usize,
    base: u32,
    separator: char,
    unknown: char,
}

fn printable(c: char) -> bool {
    !c.is_whitespace() && !c.is_control()
}

impl SymbolAlphabet {
    pub fn new(n: usize, base: u32, separator: char, unknown: char) -> Result<Self, CodecError> {
        if n == 0 {
            return Err(CodecError::EmptyAlphabet);
        }
        for i in 0..n as u64 {
            let cp = base as u64 + i;
            let ok = u32::try_from(cp)
                .ok()
                .and_then(char::from_u32)
                .is_some_and(printable);
            if !ok {
                return Err(CodecError::UnusableCodepoint(cp.min(u32::MAX as u64) as u32));
            }
        }
        let alphabet = SymbolAlphabet {
            n,
            base,
            separator,
            unknown,
        };
        for c in [separator, unknown] {
            if alphabet.index_of(c).is_some() || !printable(c) {
                return Err(CodecError::ReservedCollision(c));
            }
        }
        if separator == unknown {
            return Err(CodecError::ReservedCollision(separator));
        }
        Ok(alphabet)
    }

    /// Symbols from U+4E00 upward, separator U+2420, unknown marker U+FFFD.
    pub fn with_defaults(n: usize) -> Result<Self, CodecError> {
        Self::new(n, DEFAULT_BASE, DEFAULT_SEPARATOR, DEFAULT_UNKNOWN)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn separator(&self) -> char {
        self.separator
    }

    pub fn unknown(&self) -> char {
        self.unknown
    }

    pub fn symbol(&self, index: Symbol) -> Result<char, CodecError> {
        if (index as usize) < self.n {
            // validated in `new`
            Ok(char::from_u32(self.base + index).expect("validated range"))
        } else {
            Err(CodecError::SymbolOutOfRange {
                symbol: index,
                n: self.n,
            })
        }
    }

    pub fn index_of(&self, c: char) -> Option<Symbol> {
        let offset = (c as u32).checked_sub(self.base)?;
        ((offset as usize) < self.n).then_some(offset)
    }

    /// Classifies one whitespace-delimited unit of an encoded line.
    pub fn classify(&self, unit: &str) -> Unit {
        let mut chars = unit.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c == self.separator => Unit::Separator,
            (Some(c), None) if c == self.unknown => Unit::Unknown,
            (Some(c), None) => self.index_of(c).map_or(Unit::Invalid, Unit::Symbol),
            _ => Unit::Invalid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Symbol(Symbol),
    Separator,
    Unknown,
    /// Not a single scalar of the alphabet.
    Invalid,
}

/// Renders a code as one character per symbol.
pub fn render_code(code: &[Symbol], alphabet: &SymbolAlphabet) -> Result<String, CodecError> {
    code.iter().map(|&s| alphabet.symbol(s)).collect()
}

/// Units of one encoded sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodedLine {
    units: Vec<char>,
}

impl EncodedLine {
    pub fn from_units(units: Vec<char>) -> Self {
        EncodedLine { units }
    }

    pub fn units(&self) -> &[char] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn push(&mut self, unit: char) {
        self.units.push(unit);
    }
}

impl fmt::Display for EncodedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &u in &self.units {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            fmt::Write::write_char(f, u)?;
        }
        Ok(())
    }
}

/// Encoder counters. Merging is associative and commutative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EncodeStats {
    pub lines: u64,
    pub tokens: u64,
    pub oov_tokens: u64,
}

impl EncodeStats {
    pub fn oov_rate(&self) -> f64 {
        ratio(self.oov_tokens, self.tokens)
    }

    pub fn merge(self, other: Self) -> Self {
        EncodeStats {
            lines: self.lines + other.lines,
            tokens: self.tokens + other.tokens,
            oov_tokens: self.oov_tokens + other.oov_tokens,
        }
    }
}

/// Decoder counters. A run is a maximal non-empty group of units between
/// separators; a skipped run is one that is not a codeword.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecodeStats {
    pub lines: u64,
    pub runs: u64,
    pub skipped_runs: u64,
}

impl DecodeStats {
    pub fn skipped_rate(&self) -> f64 {
        ratio(self.skipped_runs, self.runs)
    }

    pub fn merge(self, other: Self) -> Self {
        DecodeStats {
            lines: self.lines + other.lines,
            runs: self.runs + other.runs,
            skipped_runs: self.skipped_runs + other.skipped_runs,
        }
    }
}

pub(crate) fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Encoder with every codeword pre-rendered, for streaming large corpora.
#[derive(Debug, Clone)]
pub struct LineEncoder {
    rendered: HashMap<String, String>,
    separator: char,
    unknown: char,
}

impl LineEncoder {
    pub fn new(mapping: &CodeMapping, alphabet: &SymbolAlphabet) -> Result<Self, CodecError> {
        if mapping.n() > alphabet.n() {
            return Err(CodecError::AlphabetTooSmall {
                needed: mapping.n(),
                available: alphabet.n(),
            });
        }
        let mut rendered = HashMap::with_capacity(mapping.len());
        for (word, code) in mapping.iter() {
            let mut s = String::with_capacity(code.len() * 4);
            for (i, &sym) in code.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                s.push(alphabet.symbol(sym)?);
            }
            rendered.insert(word.to_owned(), s);
        }
        Ok(LineEncoder {
            rendered,
            separator: alphabet.separator(),
            unknown: alphabet.unknown(),
        })
    }

    /// Appends the encoded form of `tokens` to `out` (no trailing newline).
    pub fn encode_into<T: AsRef<str>>(&self, tokens: &[T], out: &mut String) -> EncodeStats {
        let mut stats = EncodeStats {
            lines: 1,
            ..EncodeStats::default()
        };
        for (i, tok) in tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push(self.separator);
                out.push(' ');
            }
            stats.tokens += 1;
            match self.rendered.get(tok.as_ref()) {
                Some(r) => out.push_str(r),
                None => {
                    stats.oov_tokens += 1;
                    out.push(self.unknown);
                }
            }
        }
        stats
    }
}

/// Encodes one tokenized sentence: in-vocabulary tokens become their
/// symbols, unknown tokens a single unknown marker, and consecutive tokens
/// are separated by one separator unit.
///
/// Panics if the mapping uses more symbols than the alphabet provides.
pub fn encode_line<T: AsRef<str>>(
    tokens: &[T],
    mapping: &CodeMapping,
    alphabet: &SymbolAlphabet,
) -> EncodedLine {
    assert!(
        mapping.n() <= alphabet.n(),
        "mapping needs {} symbols, alphabet has {}",
        mapping.n(),
        alphabet.n()
    );
    let mut units = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            units.push(alphabet.separator());
        }
        match mapping.code(tok.as_ref()) {
            Some(code) => units.extend(
                code.iter()
                    .map(|&s| alphabet.symbol(s).expect("mapping within alphabet")),
            ),
            None => units.push(alphabet.unknown()),
        }
    }
    EncodedLine { units }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodedLine {
    pub tokens: Vec<String>,
    pub stats: DecodeStats,
}

/// Decodes a stream of units. Never fails: runs that are not codewords
/// (including unknown markers and stray characters) are skipped.
pub fn decode_units<'a, I>(units: I, mapping: &CodeMapping, alphabet: &SymbolAlphabet) -> DecodedLine
where
    I: IntoIterator<Item = &'a str>,
{
    let mut out = DecodedLine {
        tokens: Vec::new(),
        stats: DecodeStats {
            lines: 1,
            ..DecodeStats::default()
        },
    };
    let mut run: Vec<Symbol> = Vec::new();
    let mut run_len = 0usize;
    let mut valid = true;
    let mut flush = |run: &mut Vec<Symbol>, run_len: &mut usize, valid: &mut bool| {
        if *run_len > 0 {
            out.stats.runs += 1;
            match mapping.word(run).filter(|_| *valid) {
                Some(w) => out.tokens.push(w.to_owned()),
                None => out.stats.skipped_runs += 1,
            }
        }
        run.clear();
        *run_len = 0;
        *valid = true;
    };
    for unit in units {
        match alphabet.classify(unit) {
            Unit::Separator => flush(&mut run, &mut run_len, &mut valid),
            Unit::Symbol(s) => {
                run.push(s);
                run_len += 1;
            }
            Unit::Unknown | Unit::Invalid => {
                valid = false;
                run_len += 1;
            }
        }
    }
    flush(&mut run, &mut run_len, &mut valid);
    out
}

/// Decodes one line of encoded text (units separated by whitespace).
pub fn decode_line(line: &str, mapping: &CodeMapping, alphabet: &SymbolAlphabet) -> DecodedLine {
    decode_units(line.split_whitespace(), mapping, alphabet)
}
