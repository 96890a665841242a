//! Line-oriented corpus processing.
//!
//! Lines are read in fixed-size batches; each batch is processed in parallel
//! and written back in input order, so output never depends on the number of
//! worker threads.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use serde::Serialize;

use hufftok_core::baselines::{topk_encode, BpeSegmenter, TopKVocab};
use hufftok_core::codec::{
    decode_line, CodecError, DecodeStats, EncodeStats, LineEncoder, SymbolAlphabet,
};
use hufftok_core::corpus::{tokenize_words, FrequencyCounter, FrequencyTable, TruecaseModel};
use hufftok_core::hufftree::CodeMapping;

use crate::error::{Error, Result};

pub const BATCH_LINES: usize = 16 * 1024;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HUFFTOK_THREADS";

/// Sizes the global rayon pool from `HUFFTOK_THREADS` (all cores when unset).
pub fn init_thread_pool() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // a second initialisation (e.g. in tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Calls `f` with consecutive batches of lines, newline characters stripped.
/// The first argument is the 1-based number of the batch's first line.
pub fn for_each_batch<R, F>(mut reader: R, name: &Path, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(usize, Vec<String>) -> Result<()>,
{
    let mut lineno = 0usize;
    loop {
        let first = lineno + 1;
        let mut batch = Vec::with_capacity(BATCH_LINES);
        while batch.len() < BATCH_LINES {
            let mut line = String::new();
            match reader.read_line(&mut line) {
                Ok(0) => break,
                Ok(_) => {
                    lineno += 1;
                    if line.ends_with('\n') {
                        line.pop();
                        if line.ends_with('\r') {
                            line.pop();
                        }
                    }
                    batch.push(line);
                }
                Err(e) => return Err(Error::io_at(name, lineno + 1, e)),
            }
        }
        if batch.is_empty() {
            return Ok(());
        }
        f(first, batch)?;
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 20, f))
        .map_err(|e| Error::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(|f| BufWriter::with_capacity(1 << 20, f))
        .map_err(|e| Error::io(path, e))
}

pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for_each_batch(open(path)?, path, |_, batch| {
        lines.extend(batch);
        Ok(())
    })?;
    Ok(lines)
}

/// Word-tokenizes lines in parallel, then truecases the sentence-initial
/// token when a model is given.
pub fn tokenize_lines(lines: &[String], truecase: Option<&TruecaseModel>) -> Vec<Vec<String>> {
    lines
        .par_iter()
        .map(|l| words(l, truecase))
        .collect()
}

/// Parallel frequency count with a deterministic result.
pub fn count_parallel(lines: &[Vec<String>]) -> FrequencyTable {
    lines
        .par_chunks(4096)
        .map(|chunk| {
            let mut c = FrequencyCounter::default();
            for l in chunk {
                c.add_tokens(l);
            }
            c
        })
        .reduce(FrequencyCounter::default, |mut a, b| {
            a.merge(b);
            a
        })
        .finish()
}

/// How a corpus is truecased while it is prepared.
#[derive(Debug, Clone, Copy)]
pub enum Truecasing<'a> {
    /// Learn a model from the corpus itself and apply it.
    Train,
    Apply(&'a TruecaseModel),
    Off,
}

/// A tokenized, truecased corpus with its frequency table.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub path: PathBuf,
    pub lines: Vec<Vec<String>>,
    pub truecase: Option<TruecaseModel>,
    pub freqs: FrequencyTable,
}

pub fn prepare_corpus(path: &Path, truecasing: Truecasing<'_>) -> Result<PreparedCorpus> {
    let raw = read_lines(path)?;
    let (lines, truecase) = match truecasing {
        Truecasing::Off => (tokenize_lines(&raw, None), None),
        Truecasing::Apply(m) => (tokenize_lines(&raw, Some(m)), Some(m.clone())),
        Truecasing::Train => {
            let mut lines = tokenize_lines(&raw, None);
            let model = TruecaseModel::train(&lines);
            lines
                .par_iter_mut()
                .for_each(|l| model.truecase_in_place(l));
            (lines, Some(model))
        }
    };
    let freqs = count_parallel(&lines);
    Ok(PreparedCorpus {
        path: path.to_owned(),
        lines,
        truecase,
        freqs,
    })
}

/// Reads several corpora as one (e.g. both sides of a parallel corpus for a
/// joint vocabulary). A single truecasing model is trained over all of them.
pub fn prepare_joint(paths: &[PathBuf], truecase: bool) -> Result<(FrequencyTable, Option<TruecaseModel>)> {
    let mut lines = Vec::new();
    for p in paths {
        lines.extend(tokenize_lines(&read_lines(p)?, None));
    }
    let model = truecase.then(|| TruecaseModel::train(&lines));
    if let Some(m) = &model {
        lines.par_iter_mut().for_each(|l| m.truecase_in_place(l));
    }
    Ok((count_parallel(&lines), model))
}

/// Per-line statistics that can be summed across lines.
pub trait Tally: Default + Send {
    fn add(self, other: Self) -> Self;
}

impl Tally for EncodeStats {
    fn add(self, other: Self) -> Self {
        self.merge(other)
    }
}

impl Tally for DecodeStats {
    fn add(self, other: Self) -> Self {
        self.merge(other)
    }
}

/// Counts for BPE segmentation output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SegmentStats {
    pub lines: u64,
    pub tokens: u64,
    pub subwords: u64,
}

impl Tally for SegmentStats {
    fn add(self, other: Self) -> Self {
        SegmentStats {
            lines: self.lines + other.lines,
            tokens: self.tokens + other.tokens,
            subwords: self.subwords + other.subwords,
        }
    }
}

/// Maps every line of `input` through `f` in parallel batches and writes
/// the results (each followed by `\n`) in input order.
pub fn transform_stream<R, W, S, F>(
    input: R,
    input_name: &Path,
    mut output: W,
    output_name: &Path,
    f: F,
) -> Result<S>
where
    R: BufRead,
    W: Write,
    S: Tally,
    F: Fn(&str, &mut String) -> S + Sync,
{
    let mut total = S::default();
    for_each_batch(input, input_name, |_, batch| {
        let done: Vec<(String, S)> = batch
            .par_iter()
            .map(|line| {
                let mut out = String::with_capacity(line.len() * 2);
                let stats = f(line, &mut out);
                out.push('\n');
                (out, stats)
            })
            .collect();
        let mut text = String::with_capacity(done.iter().map(|d| d.0.len()).sum());
        for (s, st) in done {
            text.push_str(&s);
            total = std::mem::take(&mut total).add(st);
        }
        output
            .write_all(text.as_bytes())
            .map_err(|e| Error::io(output_name, e))
    })?;
    output.flush().map_err(|e| Error::io(output_name, e))?;
    Ok(total)
}

fn words(line: &str, truecase: Option<&TruecaseModel>) -> Vec<String> {
    let mut toks = tokenize_words(line);
    if let Some(m) = truecase {
        m.truecase_in_place(&mut toks);
    }
    toks
}

/// Tokenizes, truecases and encodes every line of `input`.
pub fn encode_stream<R: BufRead, W: Write>(
    input: R,
    input_name: &Path,
    output: W,
    output_name: &Path,
    encoder: &LineEncoder,
    truecase: Option<&TruecaseModel>,
) -> Result<EncodeStats> {
    transform_stream(input, input_name, output, output_name, |line, out| {
        encoder.encode_into(&words(line, truecase), out)
    })
}

/// Decodes every line of `input`, writing tokens joined by single spaces.
pub fn decode_stream<R: BufRead, W: Write>(
    input: R,
    input_name: &Path,
    output: W,
    output_name: &Path,
    mapping: &CodeMapping,
    alphabet: &SymbolAlphabet,
) -> Result<DecodeStats> {
    transform_stream(input, input_name, output, output_name, |line, out| {
        let d = decode_line(line, mapping, alphabet);
        for (i, t) in d.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(t);
        }
        d.stats
    })
}

/// Writes every token as its BPE subwords, all separated by single spaces.
pub fn segment_stream<R: BufRead, W: Write>(
    input: R,
    input_name: &Path,
    output: W,
    output_name: &Path,
    segmenter: &BpeSegmenter,
    truecase: Option<&TruecaseModel>,
) -> Result<SegmentStats> {
    transform_stream(input, input_name, output, output_name, |line, out| {
        let toks = words(line, truecase);
        let mut stats = SegmentStats {
            lines: 1,
            tokens: toks.len() as u64,
            subwords: 0,
        };
        for tok in &toks {
            for sub in segmenter.segment(tok) {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&sub);
                stats.subwords += 1;
            }
        }
        stats
    })
}

/// Encodes every line with a top-k vocabulary.
pub fn topk_stream<R: BufRead, W: Write>(
    input: R,
    input_name: &Path,
    output: W,
    output_name: &Path,
    vocab: &TopKVocab,
    alphabet: &SymbolAlphabet,
    truecase: Option<&TruecaseModel>,
) -> Result<EncodeStats> {
    if alphabet.n() < vocab.len() {
        return Err(CodecError::AlphabetTooSmall {
            needed: vocab.len(),
            available: alphabet.n(),
        }
        .into());
    }
    transform_stream(input, input_name, output, output_name, |line, out| {
        let (enc, stats) = topk_encode(&words(line, truecase), vocab, alphabet)
            .expect("alphabet size checked above");
        use std::fmt::Write as _;
        write!(out, "{enc}").unwrap();
        stats
    })
}

/// Output sink: a file or stdout.
pub fn sink(path: Option<&Path>) -> Result<(Box<dyn Write>, PathBuf)> {
    Ok(match path {
        Some(p) => (Box::new(create(p)?), p.to_owned()),
        None => (
            Box::new(BufWriter::new(io::stdout().lock())),
            PathBuf::from("<stdout>"),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hufftok_core::hufftree::build_tree;
    use std::io::Cursor;

    #[test]
    fn batches_carry_line_numbers() {
        let text = "a\r\nb\n\nc";
        let mut seen = Vec::new();
        for_each_batch(Cursor::new(text), Path::new("x"), |first, batch| {
            seen.push((first, batch));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, vec![(1, vec!["a".into(), "b".into(), "".into(), "c".into()])]);
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let bytes: &[u8] = b"ok\nbad \xff\n";
        let err = for_each_batch(Cursor::new(bytes), Path::new("in.txt"), |_, _| Ok(())).unwrap_err();
        assert!(err.to_string().starts_with("in.txt:2:"), "{err}");
    }

    #[test]
    fn stream_round_trip_and_stats() {
        let corpus = "The house is blue .\n\nthe sky is blue .\n";
        let lines: Vec<String> = corpus.lines().map(str::to_owned).collect();
        let toks = tokenize_lines(&lines, None);
        let freqs = count_parallel(&toks);
        let mapping = build_tree(&freqs, 3).unwrap().assign_codes();
        let alphabet = SymbolAlphabet::with_defaults(3).unwrap();
        let enc = LineEncoder::new(&mapping, &alphabet).unwrap();

        let mut encoded = Vec::new();
        let stats = encode_stream(Cursor::new(corpus), Path::new("in"), &mut encoded, Path::new("out"), &enc, None).unwrap();
        assert_eq!((stats.lines, stats.tokens, stats.oov_tokens), (3, 10, 0));

        let mut decoded = Vec::new();
        let dstats = decode_stream(Cursor::new(&encoded), Path::new("enc"), &mut decoded, Path::new("dec"), &mapping, &alphabet).unwrap();
        assert_eq!(String::from_utf8(decoded).unwrap(), corpus);
        assert_eq!((dstats.runs, dstats.skipped_runs), (10, 0));

        let mut encoded = Vec::new();
        let stats = encode_stream(Cursor::new("the cat\n"), Path::new("in"), &mut encoded, Path::new("out"), &enc, None).unwrap();
        assert_eq!((stats.tokens, stats.oov_tokens), (2, 1));
        assert!(String::from_utf8(encoded).unwrap().contains('\u{FFFD}'));
    }

    #[test]
    fn parallel_count_matches_sequential() {
        let lines: Vec<Vec<String>> = (0..20_000)
            .map(|i| vec![format!("w{}", i % 97), format!("v{}", i % 13)])
            .collect();
        assert_eq!(count_parallel(&lines), hufftok_core::corpus::count_frequencies(&lines));
    }
}
