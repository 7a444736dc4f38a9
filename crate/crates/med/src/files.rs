//! Line-oriented data files.
//!
//! Corpora and predictions are UTF-8 TSV with LF line endings:
//!
//! ```text
//! source_tag \t source_form \t target_tag \t target_form_or_prediction
//! ```
//!
//! Edit-tree stores start with a version header followed by sorted rows
//! `source_tag \t target_tag \t canonical_key \t frequency`. Vocabularies are
//! JSON objects with a `format_version` field.

use std::fs;
use std::path::Path;

use med_core::corpus::{Corpus, Sample, Vocabulary};
use med_core::edittree::EditTree;
use med_core::poet::PoetStore;
use serde::{Deserialize, Serialize};

use crate::{format_err, io_err, Error, Result};

pub const STORE_HEADER: &str = "#poet-store\tformat_version=1";
pub const VOCAB_VERSION: u64 = 1;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    Corpus::parse_tsv(&read_text(path)?).map_err(|e| format_err(path, e.to_string()))
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    write_text(path, &corpus.to_tsv())
}

/// One line of a prediction file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRow {
    pub source_tag: String,
    pub source_form: String,
    pub target_tag: String,
    /// May be empty when a model emits nothing.
    pub prediction: String,
}

impl PredictionRow {
    pub fn new(sample: &Sample, prediction: &str) -> Self {
        PredictionRow {
            source_tag: sample.source_tag().into(),
            source_form: sample.source_form().into(),
            target_tag: sample.target_tag().into(),
            prediction: prediction.into(),
        }
    }

    pub fn matches(&self, sample: &Sample) -> bool {
        self.source_tag == sample.source_tag()
            && self.source_form == sample.source_form()
            && self.target_tag == sample.target_tag()
    }
}

pub fn render_predictions(rows: &[PredictionRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.source_tag, r.source_form, r.target_tag, r.prediction
        ));
    }
    out
}

pub fn write_predictions(path: &Path, rows: &[PredictionRow]) -> Result<()> {
    write_text(path, &render_predictions(rows))
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRow>> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [source_tag, source_form, target_tag, prediction] = fields[..] else {
            return Err(format_err(
                path,
                format!("line {}: expected 4 tab-separated fields, found {}", i + 1, fields.len()),
            ));
        };
        rows.push(PredictionRow {
            source_tag: source_tag.into(),
            source_form: source_form.into(),
            target_tag: target_tag.into(),
            prediction: prediction.into(),
        });
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct VocabFile {
    format_version: u64,
    input: Vec<String>,
    output: Vec<String>,
}

/// Canonical JSON text of a vocabulary; its hash identifies the vocabulary.
pub fn vocab_json(vocab: &Vocabulary) -> String {
    let file = VocabFile {
        format_version: VOCAB_VERSION,
        input: vocab.input().tokens().to_vec(),
        output: vocab.output().tokens().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("vocabulary serializes");
    text.push('\n');
    text
}

pub fn write_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    write_text(path, &vocab_json(vocab))
}

pub fn read_vocab(path: &Path) -> Result<Vocabulary> {
    let file: VocabFile =
        serde_json::from_str(&read_text(path)?).map_err(|e| format_err(path, e.to_string()))?;
    if file.format_version != VOCAB_VERSION {
        return Err(Error::Version {
            path: path.into(),
            found: file.format_version,
            expected: VOCAB_VERSION,
        });
    }
    Vocabulary::from_tokens(file.input, file.output).map_err(|e| format_err(path, e.to_string()))
}

pub fn render_store(store: &PoetStore) -> String {
    let mut out = String::from(STORE_HEADER);
    out.push('\n');
    for (s, t, key, freq) in store.entries() {
        out.push_str(&format!("{s}\t{t}\t{key}\t{freq}\n"));
    }
    out
}

pub fn write_store(path: &Path, store: &PoetStore) -> Result<()> {
    write_text(path, &render_store(store))
}

pub fn read_store(path: &Path) -> Result<PoetStore> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == STORE_HEADER => {}
        Some(h) if h.starts_with("#poet-store\t") => {
            let found = h
                .rsplit('=')
                .next()
                .and_then(|v| v.parse().ok())
                .unwrap_or(0);
            return Err(Error::Version {
                path: path.into(),
                found,
                expected: 1,
            });
        }
        _ => return Err(format_err(path, "missing edit-tree store header")),
    }
    let mut store = PoetStore::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |what: String| format_err(path, format!("line {}: {what}", i + 2));
        let fields: Vec<&str> = line.split('\t').collect();
        let [s, t, key, freq] = fields[..] else {
            return Err(bad(format!("expected 4 tab-separated fields, found {}", fields.len())));
        };
        let tree = EditTree::from_key(key).map_err(|e| bad(e.to_string()))?;
        let freq: u64 = freq.parse().map_err(|_| bad(format!("bad frequency {freq:?}")))?;
        store.add(s, t, tree, freq).map_err(|e| bad(e.to_string()))?;
    }
    Ok(store)
}
