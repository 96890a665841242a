use std::io;
use std::path::PathBuf;

use hufftok_core::analysis::AnalysisError;
use hufftok_core::baselines::BaselineError;
use hufftok_core::codec::CodecError;
use hufftok_core::corpus::CorpusError;
use hufftok_core::hufftree::TreeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", location(path, *line))]
    Io {
        path: PathBuf,
        line: Option<usize>,
        #[source]
        source: io::Error,
    },
    #[error("{}: {msg}", location(path, Some(*line)))]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}: header hash mismatch: header records {expected}, content hashes to {actual}", path.display())]
    HashMismatch {
        path: PathBuf,
        expected: String,
        actual: String,
    },
    #[error("{}: corpus contains no tokens", .0.display())]
    EmptyCorpus(PathBuf),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn location(path: &std::path::Path, line: Option<usize>) -> String {
    match line {
        Some(l) => format!("{}:{l}", path.display()),
        None => path.display().to_string(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            line: None,
            source,
        }
    }

    pub(crate) fn io_at(path: impl Into<PathBuf>, line: usize, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            line: Some(line),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
