//! Model directories and ensemble training.
//!
//! A model directory holds:
//!
//! - `model.bin`: parameters, see [`crate::checkpoint`]
//! - `vocab.json`: the vocabulary
//! - `training_log.tsv`: `iteration \t mean_loss` for every update
//! - `manifest.json`: configuration, vocabulary hash and the log tail
//!
//! An ensemble directory holds one model directory per member, named
//! `member-0`, `member-1`, ...

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use med_core::corpus::Corpus;
use med_core::med::{train, LogEntry, MedModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::TrainConfig;
use crate::{checkpoint, files, format_err, io_err, Error, Result};

pub const MANIFEST_VERSION: u64 = 1;
pub const LOG_TAIL: usize = 20;
pub const MEMBER_PREFIX: &str = "member-";

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u64,
    pub config: BTreeMap<String, String>,
    pub vocab_sha256: String,
    pub parameters: usize,
    pub iterations_completed: usize,
    pub log_tail: Vec<(usize, f64)>,
}

pub fn vocab_hash(vocab: &med_core::Vocabulary) -> String {
    hex::encode(Sha256::digest(files::vocab_json(vocab).as_bytes()))
}

fn render_log(log: &[LogEntry]) -> String {
    let mut out = String::from("iteration\tloss\n");
    for e in log {
        out.push_str(&format!("{}\t{}\n", e.iteration, e.loss));
    }
    out
}

fn parse_log(path: &Path, text: &str) -> Result<Vec<LogEntry>> {
    let mut lines = text.lines();
    if lines.next() != Some("iteration\tloss") {
        return Err(format_err(path, "missing training log header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || format_err(path, format!("line {}: malformed log entry", i + 2));
            let (it, loss) = line.split_once('\t').ok_or_else(bad)?;
            Ok(LogEntry {
                iteration: it.parse().map_err(|_| bad())?,
                loss: loss.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn save(dir: &Path, model: &MedModel) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    checkpoint::save(&dir.join("model.bin"), model.params())?;
    files::write_vocab(&dir.join("vocab.json"), model.vocab())?;
    files::write_text(&dir.join("training_log.tsv"), &render_log(model.log()))?;
    let config = TrainConfig {
        model: model.config().clone(),
        ensemble_size: 1,
    };
    let log = model.log();
    let manifest = Manifest {
        format_version: MANIFEST_VERSION,
        config: config
            .pairs()
            .into_iter()
            .filter(|(k, _)| *k != "ensemble_size")
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        vocab_sha256: vocab_hash(model.vocab()),
        parameters: model.params().parameter_count(),
        iterations_completed: log.len(),
        log_tail: log[log.len().saturating_sub(LOG_TAIL)..]
            .iter()
            .map(|e| (e.iteration, e.loss))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    files::write_text(&dir.join("manifest.json"), &text)
}

pub fn load(dir: &Path) -> Result<MedModel> {
    let manifest_path = dir.join("manifest.json");
    let manifest: Manifest = serde_json::from_str(&files::read_text(&manifest_path)?)
        .map_err(|e| format_err(&manifest_path, e.to_string()))?;
    if manifest.format_version != MANIFEST_VERSION {
        return Err(Error::Version {
            path: manifest_path,
            found: manifest.format_version,
            expected: MANIFEST_VERSION,
        });
    }
    let mut config = TrainConfig::default();
    for (k, v) in &manifest.config {
        config.set(k, v).map_err(|e| format_err(&manifest_path, e))?;
    }
    let vocab_path = dir.join("vocab.json");
    let vocab = files::read_vocab(&vocab_path)?;
    if vocab_hash(&vocab) != manifest.vocab_sha256 {
        return Err(format_err(&vocab_path, "vocabulary does not match the manifest hash"));
    }
    let params = checkpoint::load(&dir.join("model.bin"))?;
    let log_path = dir.join("training_log.tsv");
    let log = parse_log(&log_path, &files::read_text(&log_path)?)?;
    MedModel::from_parts(vocab, params, config.model, log).map_err(|e| format_err(dir, e.to_string()))
}

fn is_model_dir(dir: &Path) -> bool {
    dir.join("model.bin").is_file()
}

/// Expands a comma-separated list of model or ensemble directories into
/// model directories.
pub fn resolve_dirs(spec: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let dir = PathBuf::from(part);
        if is_model_dir(&dir) {
            out.push(dir);
            continue;
        }
        let mut members: Vec<(usize, PathBuf)> = std::fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let index = name.strip_prefix(MEMBER_PREFIX)?.parse().ok()?;
                Some((index, e.path()))
            })
            .filter(|(_, p)| is_model_dir(p))
            .collect();
        if members.is_empty() {
            return Err(format_err(&dir, "neither a model directory nor an ensemble of member directories"));
        }
        members.sort();
        out.extend(members.into_iter().map(|(_, p)| p));
    }
    if out.is_empty() {
        return Err(Error::Med(med_core::med::MedError::NoModels));
    }
    Ok(out)
}

pub fn load_all(spec: &str) -> Result<Vec<MedModel>> {
    resolve_dirs(spec)?.iter().map(|d| load(d)).collect()
}

/// Trains `ensemble_size` members in parallel; member `i` uses seed
/// `seed + i` and nothing else differs.
pub fn train_ensemble(corpus: &Corpus, config: &TrainConfig) -> Result<Vec<MedModel>> {
    let configs: Vec<_> = (0..config.ensemble_size)
        .map(|i| {
            let mut c = config.model.clone();
            c.seed = c.seed.wrapping_add(i as u64);
            c
        })
        .collect();
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || train(corpus, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    });
    Ok(results.into_iter().collect::<Result<Vec<_>, _>>()?)
}

/// Writes a single model to `out`, or each member to `out/member-i`.
pub fn save_all(out: &Path, models: &[MedModel]) -> Result<()> {
    match models {
        [one] => save(out, one),
        many => many
            .iter()
            .enumerate()
            .try_for_each(|(i, m)| save(&out.join(format!("{MEMBER_PREFIX}{i}")), m)),
    }
}
