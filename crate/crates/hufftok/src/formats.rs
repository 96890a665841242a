//! On-disk formats: frequency tables, mapping files, truecasing models,
//! merge lists, top-k vocabularies, split manifests and stats JSON.
//!
//! Every text format is UTF-8 with `\n` line endings. Tab-separated files
//! have no quoting; words never contain whitespace because they come out of
//! the whitespace-splitting word tokenizer, and writers reject any that do.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hufftok_core::baselines::{MergeList, TopKVocab};
use hufftok_core::codec::{render_code, DecodeStats, EncodeStats, SymbolAlphabet};
use hufftok_core::corpus::{FrequencyTable, TruecaseModel};
use hufftok_core::hufftree::CodeMapping;

use crate::error::{Error, Result};

const MAPPING_MAGIC: &str = "#hufftok-mapping";
const MERGES_MAGIC: &str = "#hufftok-merges";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses `U+4E00`, `0x4E00` or `4E00`.
pub fn parse_codepoint(s: &str) -> Option<u32> {
    let s = s.trim();
    let hex = s
        .strip_prefix("U+")
        .or_else(|| s.strip_prefix("u+"))
        .or_else(|| s.strip_prefix("0x"))
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    u32::from_str_radix(hex, 16).ok()
}

pub fn parse_char(s: &str) -> Option<char> {
    parse_codepoint(s).and_then(char::from_u32)
}

fn check_word(word: &str) -> Result<()> {
    if word.is_empty() || word.chars().any(char::is_whitespace) {
        return Err(Error::Usage(format!(
            "word {word:?} cannot be written to a tab-separated file"
        )));
    }
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

// ---- frequency tables -------------------------------------------------------

/// `word<TAB>count`, in table order.
pub fn render_frequencies(freqs: &FrequencyTable) -> Result<String> {
    let mut out = String::new();
    for (w, c) in freqs.iter() {
        check_word(w)?;
        writeln!(out, "{w}\t{c}").unwrap();
    }
    Ok(out)
}

pub fn parse_frequencies(text: &str, path: &Path) -> Result<FrequencyTable> {
    let mut counts = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let (w, c) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected word<TAB>count"))?;
        let c: u64 = c
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("bad count {c:?}")))?;
        counts.push((w.to_owned(), c));
    }
    Ok(FrequencyTable::from_counts(counts)?)
}

// ---- mapping files ----------------------------------------------------------

/// A loaded mapping file.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingFile {
    pub mapping: CodeMapping,
    pub alphabet: SymbolAlphabet,
    pub total_tokens: u64,
    /// SHA-256 of the body (everything after the header line).
    pub sha256: String,
}

/// Renders a mapping file: one header line
///
/// ```text
/// #hufftok-mapping<TAB>n=3<TAB>types=8<TAB>tokens=15<TAB>base=U+4E00<TAB>separator=U+2420<TAB>unknown=U+FFFD<TAB>sha256=…
/// ```
///
/// followed by `word<TAB>code` lines in leaf order, where `code` is the
/// rendered symbol string. Returns the text and the body hash.
pub fn render_mapping(
    mapping: &CodeMapping,
    alphabet: &SymbolAlphabet,
    total_tokens: u64,
) -> Result<(String, String)> {
    if alphabet.n() != mapping.n() {
        return Err(Error::Usage(format!(
            "mapping has {} symbols but the alphabet has {}",
            mapping.n(),
            alphabet.n()
        )));
    }
    let mut body = String::with_capacity(mapping.len() * 16);
    for (word, code) in mapping.iter() {
        check_word(word)?;
        body.push_str(word);
        body.push('\t');
        body.push_str(&render_code(code, alphabet)?);
        body.push('\n');
    }
    let hash = sha256_hex(body.as_bytes());
    let header = format!(
        "{MAPPING_MAGIC}\tn={}\ttypes={}\ttokens={}\tbase=U+{:04X}\tseparator=U+{:04X}\tunknown=U+{:04X}\tsha256={}\n",
        mapping.n(),
        mapping.len(),
        total_tokens,
        alphabet.base(),
        alphabet.separator() as u32,
        alphabet.unknown() as u32,
        hash
    );
    Ok((header + &body, hash))
}

pub fn parse_mapping(text: &str, path: &Path) -> Result<MappingFile> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let mut fields = header.split('\t');
    if fields.next() != Some(MAPPING_MAGIC) {
        return Err(Error::parse(path, 1, "not a hufftok mapping file (bad header)"));
    }
    let mut get = std::collections::HashMap::new();
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Error::parse(path, 1, format!("bad header field {f:?}")))?;
        get.insert(k, v);
    }
    let field = |k: &str| {
        get.get(k)
            .copied()
            .ok_or_else(|| Error::parse(path, 1, format!("header lacks {k}=")))
    };
    let num = |k: &str| -> Result<u64> {
        let v = field(k)?;
        v.parse()
            .map_err(|_| Error::parse(path, 1, format!("bad {k} value {v:?}")))
    };
    let chr = |k: &str| -> Result<u32> {
        let v = field(k)?;
        parse_codepoint(v).ok_or_else(|| Error::parse(path, 1, format!("bad {k} value {v:?}")))
    };
    let n = num("n")? as usize;
    let types = num("types")? as usize;
    let total_tokens = num("tokens")?;
    let expected = field("sha256")?.to_owned();
    let actual = sha256_hex(body.as_bytes());
    if expected != actual {
        return Err(Error::HashMismatch {
            path: path.to_owned(),
            expected,
            actual,
        });
    }
    let to_char = |cp: u32, k: &str| {
        char::from_u32(cp).ok_or_else(|| Error::parse(path, 1, format!("{k} is not a scalar")))
    };
    let alphabet = SymbolAlphabet::new(
        n,
        chr("base")?,
        to_char(chr("separator")?, "separator")?,
        to_char(chr("unknown")?, "unknown")?,
    )?;
    let mut entries = Vec::with_capacity(types);
    for (i, line) in body.lines().enumerate() {
        let lineno = i + 2;
        let (word, code) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno, "expected word<TAB>code"))?;
        let code = code
            .chars()
            .map(|c| alphabet.index_of(c))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::parse(path, lineno, format!("code of {word:?} uses a character outside the alphabet")))?;
        entries.push((word.to_owned(), code));
    }
    if entries.len() != types {
        return Err(Error::parse(
            path,
            1,
            format!("header says {types} types, file has {}", entries.len()),
        ));
    }
    let mapping = CodeMapping::from_entries(n, entries)?;
    Ok(MappingFile {
        mapping,
        alphabet,
        total_tokens,
        sha256: actual,
    })
}

pub fn read_mapping(path: &Path) -> Result<MappingFile> {
    parse_mapping(&read_text(path)?, path)
}

// ---- truecasing models ------------------------------------------------------

/// `lowercase<TAB>canonical`, sorted by key.
pub fn render_truecase(model: &TruecaseModel) -> Result<String> {
    let mut out = String::new();
    for (k, v) in model.iter() {
        check_word(v)?;
        writeln!(out, "{k}\t{v}").unwrap();
    }
    Ok(out)
}

pub fn parse_truecase(text: &str, path: &Path) -> Result<TruecaseModel> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected lowercase<TAB>canonical"))?;
        pairs.push((k.to_owned(), v.to_owned()));
    }
    Ok(TruecaseModel::from_pairs(pairs))
}

pub fn read_truecase(path: &Path) -> Result<TruecaseModel> {
    parse_truecase(&read_text(path)?, path)
}

// ---- merge lists ------------------------------------------------------------

/// Header `#hufftok-merges marker=U+2581`, then `left right` per merge in
/// application order.
pub fn render_merges(merges: &MergeList) -> String {
    let mut out = format!("{MERGES_MAGIC} marker=U+{:04X}\n", merges.marker() as u32);
    for (l, r) in merges.merges() {
        writeln!(out, "{l} {r}").unwrap();
    }
    out
}

/// Reads a merge list. The header line is optional; without it the marker
/// defaults to U+2581.
pub fn parse_merges(text: &str, path: &Path) -> Result<MergeList> {
    let mut lines = text.lines().enumerate().peekable();
    let mut marker = hufftok_core::baselines::DEFAULT_MARKER;
    if let Some((_, first)) = lines.peek() {
        if let Some(rest) = first.strip_prefix(MERGES_MAGIC) {
            let m = rest
                .trim()
                .strip_prefix("marker=")
                .and_then(parse_char)
                .ok_or_else(|| Error::parse(path, 1, "bad marker in merges header"))?;
            marker = m;
            lines.next();
        }
    }
    let mut merges = Vec::new();
    for (i, line) in lines.filter(|(_, l)| !l.is_empty()) {
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                merges.push((l.to_owned(), r.to_owned()))
            }
            _ => return Err(Error::parse(path, i + 1, "expected `left right`")),
        }
    }
    Ok(MergeList::new(merges, marker))
}

pub fn read_merges(path: &Path) -> Result<MergeList> {
    parse_merges(&read_text(path)?, path)
}

// ---- top-k vocabularies -----------------------------------------------------

/// `word<TAB>rank`, rank 0 first.
pub fn render_topk(vocab: &TopKVocab) -> Result<String> {
    let mut out = String::new();
    for (i, w) in vocab.words().iter().enumerate() {
        check_word(w)?;
        writeln!(out, "{w}\t{i}").unwrap();
    }
    Ok(out)
}

pub fn parse_topk(text: &str, path: &Path) -> Result<TopKVocab> {
    let mut ranked: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let (w, r) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected word<TAB>rank"))?;
        let r = r
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("bad rank {r:?}")))?;
        ranked.push((r, w.to_owned()));
    }
    ranked.sort();
    if ranked.iter().enumerate().any(|(i, (r, _))| i != *r) {
        return Err(Error::parse(path, 1, "ranks must be 0..len without gaps"));
    }
    let words: Vec<String> = ranked.into_iter().map(|(_, w)| w).collect();
    Ok(TopKVocab::from_ranked(words.len().max(1), words)?)
}

pub fn read_topk(path: &Path) -> Result<TopKVocab> {
    parse_topk(&read_text(path)?, path)
}

// ---- JSON records -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeStatsRecord {
    pub lines: u64,
    pub tokens: u64,
    pub oov_tokens: u64,
    pub oov_rate: f64,
}

impl From<EncodeStats> for EncodeStatsRecord {
    fn from(s: EncodeStats) -> Self {
        EncodeStatsRecord {
            lines: s.lines,
            tokens: s.tokens,
            oov_tokens: s.oov_tokens,
            oov_rate: s.oov_rate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeStatsRecord {
    pub lines: u64,
    pub runs: u64,
    pub skipped_runs: u64,
    pub skipped_rate: f64,
}

impl From<DecodeStats> for DecodeStatsRecord {
    fn from(s: DecodeStats) -> Self {
        DecodeStatsRecord {
            lines: s.lines,
            runs: s.runs,
            skipped_runs: s.skipped_runs,
            skipped_rate: s.skipped_rate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub source: String,
    pub target: String,
    pub seed: u64,
    pub rate: f64,
    pub total_lines: usize,
    pub train_lines: usize,
    pub test_lines: usize,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hufftok_core::hufftree::build_tree;

    fn toy() -> FrequencyTable {
        FrequencyTable::from_counts(
            [
                ("the", 4),
                ("is", 3),
                ("blue", 2),
                ("house", 2),
                (".", 1),
                ("hill", 1),
                ("on", 1),
                ("sky", 1),
            ]
            .map(|(w, c)| (w.to_string(), c)),
        )
        .unwrap()
    }

    #[test]
    fn mapping_file_layout() {
        let m = build_tree(&toy(), 3).unwrap().assign_codes();
        let a = SymbolAlphabet::with_defaults(3).unwrap();
        let (text, hash) = render_mapping(&m, &a, 15).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with(
            "#hufftok-mapping\tn=3\ttypes=8\ttokens=15\tbase=U+4E00\tseparator=U+2420\tunknown=U+FFFD\tsha256="
        ));
        assert!(header.ends_with(&hash));
        assert_eq!(lines.next(), Some("the\t\u{4E01}\u{4E02}"));
        assert_eq!(lines.last(), Some("sky\t\u{4E00}\u{4E00}"));

        let back = parse_mapping(&text, Path::new("toy.map")).unwrap();
        assert_eq!(back.mapping, m);
        assert_eq!(back.alphabet, a);
        assert_eq!(back.total_tokens, 15);
        assert_eq!(back.sha256, hash);
    }

    #[test]
    fn mapping_corruption_is_detected() {
        let m = build_tree(&toy(), 3).unwrap().assign_codes();
        let a = SymbolAlphabet::with_defaults(3).unwrap();
        let (text, _) = render_mapping(&m, &a, 15).unwrap();
        let tampered = text.replace("sky\t", "sea\t");
        let err = parse_mapping(&tampered, Path::new("x.map")).unwrap_err();
        assert!(matches!(err, Error::HashMismatch { .. }), "{err}");
        assert!(err.to_string().contains("hash mismatch"));

        let err = parse_mapping("hello\n", Path::new("x.map")).unwrap_err();
        assert!(err.to_string().contains("bad header"));
    }

    #[test]
    fn codepoints() {
        assert_eq!(parse_codepoint("U+4E00"), Some(0x4E00));
        assert_eq!(parse_codepoint("0x2420"), Some(0x2420));
        assert_eq!(parse_codepoint("fffd"), Some(0xFFFD));
        assert_eq!(parse_codepoint("zz"), None);
        assert_eq!(parse_char("D800"), None);
    }

    #[test]
    fn small_formats_round_trip() {
        let p = Path::new("t");
        let f = toy();
        assert_eq!(parse_frequencies(&render_frequencies(&f).unwrap(), p).unwrap(), f);
        assert!(render_frequencies(&f).unwrap().starts_with("the\t4\nis\t3\nblue\t2\n"));

        let merges = MergeList::new(vec![("a".into(), "b".into()), ("#".into(), "ab".into())], '\u{2581}');
        let text = render_merges(&merges);
        assert_eq!(text, "#hufftok-merges marker=U+2581\na b\n# ab\n");
        assert_eq!(parse_merges(&text, p).unwrap(), merges);
        assert_eq!(parse_merges("a b\n", p).unwrap().len(), 1);
        assert!(parse_merges("a b c\n", p).is_err());

        let v = hufftok_core::baselines::build_topk(&f, 3).unwrap();
        let text = render_topk(&v).unwrap();
        assert_eq!(text, "the\t0\nis\t1\nblue\t2\n");
        assert_eq!(parse_topk(&text, p).unwrap().words(), v.words());

        let tc = TruecaseModel::from_pairs([("paris".into(), "Paris".into())]);
        assert_eq!(parse_truecase(&render_truecase(&tc).unwrap(), p).unwrap(), tc);
    }

    #[test]
    fn stats_json_fields() {
        let rec = EncodeStatsRecord::from(EncodeStats {
            lines: 2,
            tokens: 10,
            oov_tokens: 1,
        });
        let v: serde_json::Value = serde_json::from_str(&to_json(&rec).unwrap()).unwrap();
        assert_eq!(v["oov_rate"], 0.1);
        assert_eq!(v["tokens"], 10);
        let rec = DecodeStatsRecord::from(DecodeStats {
            lines: 1,
            runs: 4,
            skipped_runs: 1,
        });
        let v: serde_json::Value = serde_json::from_str(&to_json(&rec).unwrap()).unwrap();
        assert_eq!(v["skipped_rate"], 0.25);
        assert_eq!(v["skipped_runs"], 1);
    }

    proptest::proptest! {
        #[test]
        fn mapping_and_frequencies_survive_a_file_round_trip(
            counts in proptest::collection::btree_map("[a-z\\p{Greek}.,!-]{1,8}", 1u64..500, 1..200),
            n in 2usize..40,
        ) {
            let f = FrequencyTable::from_counts(counts).unwrap();
            let p = Path::new("prop.tsv");
            proptest::prop_assert_eq!(&parse_frequencies(&render_frequencies(&f).unwrap(), p).unwrap(), &f);

            let mapping = build_tree(&f, n).unwrap().assign_codes();
            let alphabet = SymbolAlphabet::with_defaults(n).unwrap();
            let (text, hash) = render_mapping(&mapping, &alphabet, f.total_tokens()).unwrap();
            let back = parse_mapping(&text, p).unwrap();
            proptest::prop_assert_eq!(back.mapping, mapping);
            proptest::prop_assert_eq!(back.sha256, hash);
            proptest::prop_assert_eq!(back.total_tokens, f.total_tokens());
        }
    }
}
