//! Command-line surface.
//!
//! Every subcommand takes its parameters as flags. A TOML file passed with
//! `--config` may supply defaults for the shared ones (`symbols`, `seed`,
//! `rate`, `merges`, `topk`, `base-codepoint`, `separator`, `unknown`,
//! `output`); a flag given on the command line always wins.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hufftok_core::analysis::{
    compare_report, histogram_for_bpe, histogram_for_mapping, histogram_for_topk, TokenizationReport,
};
use hufftok_core::baselines::{bpe_learn, build_topk, initial_alphabet, MergeList, DEFAULT_MARKER};
use hufftok_core::codec::{LineEncoder, SymbolAlphabet, DEFAULT_BASE, DEFAULT_SEPARATOR, DEFAULT_UNKNOWN};
use hufftok_core::corpus::{split_corpus, SplitSpec, TruecaseModel};
use hufftok_core::hufftree::{build_tree, code_length_stats};

use crate::error::{Error, Result};
use crate::figure::{comparison_csv, comparison_svg, comparison_table};
use crate::formats::{
    parse_char, parse_codepoint, read_mapping, read_merges, read_text, read_topk, read_truecase,
    render_frequencies, render_mapping, render_merges, render_topk, render_truecase, to_json,
    write_text, DecodeStatsRecord, EncodeStatsRecord, SplitManifest,
};
use crate::pipeline::{
    self, decode_stream, encode_stream, prepare_corpus, prepare_joint, segment_stream, sink, topk_stream,
    Truecasing,
};

#[derive(Debug, Parser)]
#[command(name = "hufftok", version, about = "Huffman-coding subword tokenizer")]
pub struct Cli {
    /// TOML file with default values for flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a parallel corpus into train and test sets
    Split(SplitArgs),
    /// Build a Huffman mapping for each corpus (one per language side)
    Build(BuildArgs),
    /// Encode text with a mapping
    Encode(EncodeArgs),
    /// Decode symbol streams back to tokens
    Decode(DecodeArgs),
    /// Learn BPE merges jointly over all given corpora
    BpeLearn(BpeLearnArgs),
    /// Segment text with learned BPE merges
    BpeEncode(BpeEncodeArgs),
    /// Build the top-k most frequent words vocabulary, optionally encoding a file with it
    Topk(TopkArgs),
    /// Tokenization report for one corpus under a mapping, merge list or top-k vocabulary
    Stats(StatsArgs),
    /// Compare Huffman, BPE and top-k histograms across vocabulary sizes
    Compare(CompareArgs),
}

/// Defaults read from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub symbols: Option<usize>,
    pub seed: Option<u64>,
    pub rate: Option<f64>,
    pub merges: Option<usize>,
    pub topk: Option<usize>,
    pub base_codepoint: Option<String>,
    pub separator: Option<String>,
    pub unknown: Option<String>,
    pub output: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        toml::from_str(&read_text(path)?)
            .map_err(|e| Error::Usage(format!("{}: {}", path.display(), e.message())))
    }
}

fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T> {
    flag.or(config)
        .ok_or_else(|| Error::Usage(format!("--{name} is required (on the command line or in --config)")))
}

fn codepoint_arg(s: &str) -> std::result::Result<u32, String> {
    parse_codepoint(s).ok_or_else(|| format!("not a hexadecimal codepoint: {s:?}"))
}

fn char_arg(s: &str) -> std::result::Result<char, String> {
    parse_char(s).ok_or_else(|| format!("not a Unicode scalar value: {s:?}"))
}

/// Vocabulary sizes: `500`, `2k` (= 2000), `32K`.
pub fn size_arg(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim();
    let (digits, scale) = match t.strip_suffix(['k', 'K']) {
        Some(d) => (d, 1000),
        None => (t, 1),
    };
    digits
        .parse::<usize>()
        .ok()
        .and_then(|v| v.checked_mul(scale))
        .ok_or_else(|| format!("not a size: {s:?}"))
}

#[derive(Debug, Clone, Default, Args)]
pub struct AlphabetArgs {
    /// Codepoint of symbol 0 (hex, e.g. 4E00 or U+4E00)
    #[arg(long, value_name = "HEX", value_parser = codepoint_arg)]
    pub base_codepoint: Option<u32>,
    /// Word separator codepoint
    #[arg(long, value_name = "HEX", value_parser = char_arg)]
    pub separator: Option<char>,
    /// Unknown-word marker codepoint
    #[arg(long, value_name = "HEX", value_parser = char_arg)]
    pub unknown: Option<char>,
}

impl AlphabetArgs {
    fn resolve(&self, n: usize, cfg: &Config) -> Result<SymbolAlphabet> {
        let from_cfg = |v: &Option<String>, key: &str| -> Result<Option<u32>> {
            v.as_deref()
                .map(|s| parse_codepoint(s).ok_or_else(|| Error::Usage(format!("config {key}: bad codepoint {s:?}"))))
                .transpose()
        };
        let to_char = |cp: u32, key: &str| {
            char::from_u32(cp).ok_or_else(|| Error::Usage(format!("config {key}: U+{cp:04X} is not a scalar value")))
        };
        let base = match self.base_codepoint {
            Some(b) => b,
            None => from_cfg(&cfg.base_codepoint, "base-codepoint")?.unwrap_or(DEFAULT_BASE),
        };
        let separator = match self.separator {
            Some(c) => c,
            None => match from_cfg(&cfg.separator, "separator")? {
                Some(cp) => to_char(cp, "separator")?,
                None => DEFAULT_SEPARATOR,
            },
        };
        let unknown = match self.unknown {
            Some(c) => c,
            None => match from_cfg(&cfg.unknown, "unknown")? {
                Some(cp) => to_char(cp, "unknown")?,
                None => DEFAULT_UNKNOWN,
            },
        };
        Ok(SymbolAlphabet::new(n, base, separator, unknown)?)
    }
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Fraction of lines moved to the test set
    #[arg(long)]
    pub rate: Option<f64>,
    /// Shuffle seed [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for train.src, train.tgt, test.src, test.tgt and manifest.json [default: .]
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
    pub source: PathBuf,
    pub target: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Number of coding symbols (branching factor, at least 2)
    #[arg(long, short = 'n')]
    pub symbols: Option<usize>,
    /// Output directory [default: the corpus's directory]
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Skip truecasing
    #[arg(long)]
    pub no_truecase: bool,
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(required = true)]
    pub corpora: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long, value_name = "FILE")]
    pub mapping: PathBuf,
    /// Truecasing model [default: the `.truecase.tsv` written next to the mapping, if any]
    #[arg(long, value_name = "FILE")]
    pub truecase: Option<PathBuf>,
    #[arg(long, conflicts_with = "truecase")]
    pub no_truecase: bool,
    /// Encoded text [default: stdout]
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Also write the stats JSON here
    #[arg(long, value_name = "FILE")]
    pub stats: Option<PathBuf>,
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, value_name = "FILE")]
    pub mapping: PathBuf,
    /// Decoded text [default: stdout]
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Also write the stats JSON here
    #[arg(long, value_name = "FILE")]
    pub stats: Option<PathBuf>,
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct BpeLearnArgs {
    /// Number of merges to learn
    #[arg(long)]
    pub merges: Option<usize>,
    /// Merge list file [default: stdout]
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Write the joint truecasing model here
    #[arg(long, value_name = "FILE", conflicts_with = "no_truecase")]
    pub truecase_output: Option<PathBuf>,
    #[arg(long)]
    pub no_truecase: bool,
    #[arg(required = true)]
    pub corpora: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BpeEncodeArgs {
    /// Merge list from bpe-learn
    #[arg(long, value_name = "FILE")]
    pub codes: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub truecase: Option<PathBuf>,
    /// Segmented text [default: stdout]
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct TopkArgs {
    /// Vocabulary size
    #[arg(long)]
    pub topk: Option<usize>,
    /// Vocabulary file (`word<TAB>rank`) [default: stdout unless --encode is given]
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub no_truecase: bool,
    /// Encode this file with the vocabulary
    #[arg(long, value_name = "FILE")]
    pub encode: Option<PathBuf>,
    /// Encoded text [default: stdout]
    #[arg(long, value_name = "FILE", requires = "encode")]
    pub encoded: Option<PathBuf>,
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(required = true)]
    pub corpora: Vec<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("vocabulary").required(true).args(["mapping", "codes", "vocab"])))]
pub struct StatsArgs {
    /// Huffman mapping file
    #[arg(long, value_name = "FILE")]
    pub mapping: Option<PathBuf>,
    /// BPE merge list
    #[arg(long, value_name = "FILE")]
    pub codes: Option<PathBuf>,
    /// Top-k vocabulary file
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// Truecasing model [default: next to the mapping, else trained on the corpus]
    #[arg(long, value_name = "FILE")]
    pub truecase: Option<PathBuf>,
    #[arg(long, conflicts_with = "truecase")]
    pub no_truecase: bool,
    /// Report JSON [default: stdout]
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Huffman symbol counts, e.g. 1k,2k,4k
    #[arg(long, value_delimiter = ',', value_parser = size_arg)]
    pub huffman: Vec<usize>,
    /// BPE merge counts, e.g. 2k,4k,8k
    #[arg(long, value_delimiter = ',', value_parser = size_arg)]
    pub bpe: Vec<usize>,
    /// Top-k vocabulary sizes
    #[arg(long, value_delimiter = ',', value_parser = size_arg)]
    pub topk: Vec<usize>,
    /// Include previously written report JSON files
    #[arg(long, value_name = "FILE")]
    pub report: Vec<PathBuf>,
    #[arg(long)]
    pub no_truecase: bool,
    /// Directory for reports.json, comparison.csv, comparison.txt and comparison.svg [default: .]
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Split(a) => cmd_split(a, &cfg),
        Command::Build(a) => cmd_build(a, &cfg),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::BpeLearn(a) => cmd_bpe_learn(a, &cfg),
        Command::BpeEncode(a) => cmd_bpe_encode(a),
        Command::Topk(a) => cmd_topk(a, &cfg),
        Command::Stats(a) => cmd_stats(a),
        Command::Compare(a) => cmd_compare(a, &cfg),
    }
}

/// Stats go to stdout when the payload went to a file, otherwise to stderr
/// so they do not mix with the payload.
fn emit_stats(json: &str, stats_file: Option<&Path>, payload_to_file: bool) -> Result<()> {
    if let Some(p) = stats_file {
        write_text(p, json)?;
    }
    if payload_to_file {
        print!("{json}");
    } else {
        eprint!("{json}");
    }
    Ok(())
}

fn file_name(path: &Path) -> Result<String> {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| Error::Usage(format!("{}: not a file path", path.display())))
}

fn joined_lines(lines: &[String]) -> String {
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(l);
        out.push('\n');
    }
    out
}

fn cmd_split(a: SplitArgs, cfg: &Config) -> Result<()> {
    let rate = required(a.rate, cfg.rate, "rate")?;
    let seed = a.seed.or(cfg.seed).unwrap_or(42);
    let spec = SplitSpec::new(rate, seed)?;
    let dir = a.output.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let src = pipeline::read_lines(&a.source)?;
    let tgt = pipeline::read_lines(&a.target)?;
    let (train, test) = split_corpus(&src, &tgt, &spec)?;
    write_text(&dir.join("train.src"), &joined_lines(&train.source))?;
    write_text(&dir.join("train.tgt"), &joined_lines(&train.target))?;
    write_text(&dir.join("test.src"), &joined_lines(&test.source))?;
    write_text(&dir.join("test.tgt"), &joined_lines(&test.target))?;
    let manifest = SplitManifest {
        source: a.source.display().to_string(),
        target: a.target.display().to_string(),
        seed,
        rate,
        total_lines: src.len(),
        train_lines: train.source.len(),
        test_lines: test.source.len(),
    };
    let json = to_json(&manifest)?;
    write_text(&dir.join("manifest.json"), &json)?;
    print!("{json}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct BuildSummary {
    corpus: String,
    mapping: String,
    frequencies: String,
    truecase: Option<String>,
    symbols: usize,
    types: usize,
    tokens: u64,
    max_code_length: usize,
    weighted_path_length: u64,
    sha256: String,
}

fn check_symbols(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::Usage(format!("--symbols must be at least 2, got {n}")));
    }
    Ok(n)
}

fn cmd_build(a: BuildArgs, cfg: &Config) -> Result<()> {
    let n = check_symbols(required(a.symbols, cfg.symbols, "symbols")?)?;
    let alphabet = a.alphabet.resolve(n, cfg)?;
    let mut summaries = Vec::new();
    for corpus in &a.corpora {
        let truecasing = if a.no_truecase { Truecasing::Off } else { Truecasing::Train };
        let prepared = prepare_corpus(corpus, truecasing)?;
        if prepared.freqs.is_empty() {
            return Err(Error::EmptyCorpus(corpus.clone()));
        }
        let mapping = build_tree(&prepared.freqs, n)?.assign_codes();
        let lengths = code_length_stats(&mapping, &prepared.freqs)?;
        let (text, sha256) = render_mapping(&mapping, &alphabet, prepared.freqs.total_tokens())?;

        let dir = match a.output.as_ref().or(cfg.output.as_ref()) {
            Some(d) => d.clone(),
            None => corpus.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        let name = file_name(corpus)?;
        let map_path = dir.join(format!("{name}.map.tsv"));
        let freq_path = dir.join(format!("{name}.freq.tsv"));
        write_text(&map_path, &text)?;
        write_text(&freq_path, &render_frequencies(&prepared.freqs)?)?;
        let truecase_path = match &prepared.truecase {
            Some(model) => {
                let p = dir.join(format!("{name}.truecase.tsv"));
                write_text(&p, &render_truecase(model)?)?;
                Some(p.display().to_string())
            }
            None => None,
        };
        summaries.push(BuildSummary {
            corpus: corpus.display().to_string(),
            mapping: map_path.display().to_string(),
            frequencies: freq_path.display().to_string(),
            truecase: truecase_path,
            symbols: n,
            types: mapping.len(),
            tokens: prepared.freqs.total_tokens(),
            max_code_length: lengths.max_code_length,
            weighted_path_length: lengths.weighted_path_length,
            sha256,
        });
    }
    print!("{}", to_json(&summaries)?);
    Ok(())
}

/// `x.map.tsv` -> `x.truecase.tsv`, if that file exists.
fn sibling_truecase(mapping: &Path) -> Option<PathBuf> {
    let name = mapping.file_name()?.to_str()?;
    let stem = name.strip_suffix(".map.tsv")?;
    let p = mapping.with_file_name(format!("{stem}.truecase.tsv"));
    p.is_file().then_some(p)
}

fn load_truecase(explicit: Option<&Path>, off: bool, mapping: Option<&Path>) -> Result<Option<TruecaseModel>> {
    if off {
        return Ok(None);
    }
    match explicit.map(Path::to_path_buf).or_else(|| mapping.and_then(sibling_truecase)) {
        Some(p) => read_truecase(&p).map(Some),
        None => Ok(None),
    }
}

fn cmd_encode(a: EncodeArgs) -> Result<()> {
    let file = read_mapping(&a.mapping)?;
    let truecase = load_truecase(a.truecase.as_deref(), a.no_truecase, Some(&a.mapping))?;
    let encoder = LineEncoder::new(&file.mapping, &file.alphabet)?;
    let (out, out_name) = sink(a.output.as_deref())?;
    let stats = encode_stream(pipeline::open(&a.input)?, &a.input, out, &out_name, &encoder, truecase.as_ref())?;
    emit_stats(&to_json(&EncodeStatsRecord::from(stats))?, a.stats.as_deref(), a.output.is_some())
}

fn cmd_decode(a: DecodeArgs) -> Result<()> {
    let file = read_mapping(&a.mapping)?;
    let (out, out_name) = sink(a.output.as_deref())?;
    let stats = decode_stream(pipeline::open(&a.input)?, &a.input, out, &out_name, &file.mapping, &file.alphabet)?;
    emit_stats(&to_json(&DecodeStatsRecord::from(stats))?, a.stats.as_deref(), a.output.is_some())
}

#[derive(Debug, Serialize)]
struct BpeSummary {
    merges_requested: usize,
    merges_learned: usize,
    initial_symbols: usize,
    vocabulary_size: usize,
}

fn cmd_bpe_learn(a: BpeLearnArgs, cfg: &Config) -> Result<()> {
    let num = required(a.merges, cfg.merges, "merges")?;
    let (freqs, model) = prepare_joint(&a.corpora, !a.no_truecase)?;
    let merges = bpe_learn(&freqs, num, DEFAULT_MARKER);
    let initial = initial_alphabet(&freqs, DEFAULT_MARKER);
    let summary = BpeSummary {
        merges_requested: num,
        merges_learned: merges.len(),
        initial_symbols: initial.len(),
        vocabulary_size: merges.vocabulary(&initial).len(),
    };
    match &a.output {
        Some(p) => write_text(p, &render_merges(&merges))?,
        None => print!("{}", render_merges(&merges)),
    }
    if let (Some(p), Some(m)) = (&a.truecase_output, &model) {
        write_text(p, &render_truecase(m)?)?;
    }
    emit_stats(&to_json(&summary)?, None, a.output.is_some())
}

fn cmd_bpe_encode(a: BpeEncodeArgs) -> Result<()> {
    let merges = read_merges(&a.codes)?;
    let truecase = load_truecase(a.truecase.as_deref(), false, None)?;
    let (out, out_name) = sink(a.output.as_deref())?;
    let stats = segment_stream(
        pipeline::open(&a.input)?,
        &a.input,
        out,
        &out_name,
        &merges.segmenter(),
        truecase.as_ref(),
    )?;
    emit_stats(&to_json(&stats)?, None, a.output.is_some())
}

fn cmd_topk(a: TopkArgs, cfg: &Config) -> Result<()> {
    let k = required(a.topk, cfg.topk, "topk")?;
    let (freqs, model) = prepare_joint(&a.corpora, !a.no_truecase)?;
    let vocab = build_topk(&freqs, k)?;
    match (&a.output, &a.encode) {
        (Some(p), _) => write_text(p, &render_topk(&vocab)?)?,
        (None, None) => print!("{}", render_topk(&vocab)?),
        (None, Some(_)) => {}
    }
    if let Some(input) = &a.encode {
        let alphabet = a.alphabet.resolve(k.max(vocab.len()), cfg)?;
        let (out, out_name) = sink(a.encoded.as_deref())?;
        let stats = topk_stream(pipeline::open(input)?, input, out, &out_name, &vocab, &alphabet, model.as_ref())?;
        emit_stats(&to_json(&EncodeStatsRecord::from(stats))?, None, a.encoded.is_some())?;
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let explicit = load_truecase(a.truecase.as_deref(), a.no_truecase, a.mapping.as_deref())?;
    let truecasing = match (&explicit, a.no_truecase) {
        (Some(m), _) => Truecasing::Apply(m),
        (None, true) => Truecasing::Off,
        (None, false) => Truecasing::Train,
    };
    let prepared = prepare_corpus(&a.corpus, truecasing)?;
    let report = if let Some(p) = &a.mapping {
        histogram_for_mapping(&read_mapping(p)?.mapping, &prepared.freqs)
    } else if let Some(p) = &a.codes {
        histogram_for_bpe(&read_merges(p)?, &prepared.freqs)
    } else if let Some(p) = &a.vocab {
        histogram_for_topk(&read_topk(p)?, &prepared.freqs)
    } else {
        unreachable!("clap requires one vocabulary source")
    };
    let json = to_json(&report.with_corpus(a.corpus.display().to_string()))?;
    match &a.output {
        Some(p) => write_text(p, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

/// Histograms for every requested vocabulary size on one prepared corpus.
fn corpus_reports(a: &CompareArgs, corpus: &Path) -> Result<Vec<TokenizationReport>> {
    let truecasing = if a.no_truecase { Truecasing::Off } else { Truecasing::Train };
    let prepared = prepare_corpus(corpus, truecasing)?;
    if prepared.freqs.is_empty() {
        return Err(Error::EmptyCorpus(corpus.to_owned()));
    }
    let freqs = &prepared.freqs;
    let label = corpus.display().to_string();

    for &n in &a.huffman {
        check_symbols(n)?;
    }
    let mut reports = a
        .huffman
        .par_iter()
        .map(|&n| {
            let mapping = build_tree(freqs, n)?.assign_codes();
            Ok(histogram_for_mapping(&mapping, freqs).with_corpus(label.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    // merge lists are prefixes of each other, so learn once at the largest size
    if let Some(&most) = a.bpe.iter().max() {
        let all = bpe_learn(freqs, most, DEFAULT_MARKER);
        let bpe: Vec<_> = a
            .bpe
            .par_iter()
            .map(|&m| {
                let prefix = MergeList::new(all.merges()[..m.min(all.len())].to_vec(), all.marker());
                let mut r = histogram_for_bpe(&prefix, freqs).with_corpus(label.clone());
                r.vocab_size = m;
                r
            })
            .collect();
        reports.extend(bpe);
    }
    for &k in &a.topk {
        reports.push(histogram_for_topk(&build_topk(freqs, k)?, freqs).with_corpus(label.clone()));
    }
    Ok(reports)
}

fn cmd_compare(a: CompareArgs, cfg: &Config) -> Result<()> {
    let wants_corpus = !(a.huffman.is_empty() && a.bpe.is_empty() && a.topk.is_empty());
    let mut reports = match (&a.corpus, wants_corpus) {
        (Some(c), true) => corpus_reports(&a, c)?,
        (None, true) => return Err(Error::Usage("vocabulary sizes given but no corpus".into())),
        (Some(_), false) => {
            return Err(Error::Usage("corpus given without --huffman, --bpe or --topk sizes".into()))
        }
        (None, false) => Vec::new(),
    };
    for p in &a.report {
        let r: TokenizationReport = serde_json::from_str(&read_text(p)?)
            .map_err(|e| Error::parse(p, e.line(), e.to_string()))?;
        reports.push(r);
    }
    if reports.is_empty() {
        return Err(Error::Usage(
            "nothing to compare: give a corpus with vocabulary sizes, or --report files".into(),
        ));
    }
    let cmp = compare_report(&reports)?;
    let dir = a.output.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    write_text(&dir.join("reports.json"), &to_json(&reports)?)?;
    write_text(&dir.join("comparison.csv"), &comparison_csv(&cmp))?;
    let table = comparison_table(&cmp);
    write_text(&dir.join("comparison.txt"), &table)?;
    write_text(&dir.join("comparison.svg"), &comparison_svg(&cmp))?;
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sizes() {
        assert_eq!(size_arg("1k"), Ok(1000));
        assert_eq!(size_arg("32K"), Ok(32000));
        assert_eq!(size_arg("500"), Ok(500));
        assert!(size_arg("k").is_err());
        assert!(size_arg("2m").is_err());
    }

    #[test]
    fn config_values_fill_missing_flags() {
        let cfg: Config = toml::from_str("symbols = 16\nbase-codepoint = \"U+3400\"\nseparator = \"2420\"\n").unwrap();
        assert_eq!(required(None, cfg.symbols, "symbols").unwrap(), 16);
        assert_eq!(required(Some(8), cfg.symbols, "symbols").unwrap(), 8);
        let alpha = AlphabetArgs::default().resolve(4, &cfg).unwrap();
        assert_eq!(alpha.base(), 0x3400);
        let flags = AlphabetArgs {
            base_codepoint: Some(0x4E00),
            ..AlphabetArgs::default()
        };
        assert_eq!(flags.resolve(4, &cfg).unwrap().base(), 0x4E00);
        assert!(toml::from_str::<Config>("symbol = 3").is_err());
        assert!(required::<usize>(None, None, "symbols").is_err());
    }
}
