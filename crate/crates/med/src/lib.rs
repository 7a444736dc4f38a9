//! File formats, checkpoints and experiment plumbing around [`med_core`].
//!
//! - [`files`]: corpus, prediction, vocabulary and edit-tree store files
//! - [`checkpoint`]: binary parameter container
//! - [`config`]: flat `key = value` training configuration
//! - [`model`]: model directories and ensemble training
//! - [`report`]: evaluation report rendering
//! - [`cli`]: the `med` command line

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod files;
pub mod model;
pub mod report;

pub use med_core;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: unsupported format version {found} (expected {expected})")]
    Version { path: PathBuf, found: u64, expected: u64 },
    #[error(transparent)]
    Corpus(#[from] med_core::corpus::CorpusError),
    #[error(transparent)]
    Med(#[from] med_core::med::MedError),
    #[error(transparent)]
    Harness(#[from] med_core::harness::HarnessError),
    #[error(transparent)]
    Poet(#[from] med_core::poet::PoetError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn format_err(path: &std::path::Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}
