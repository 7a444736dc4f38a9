//! The `med` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::bail;
use clap::{Parser, Subcommand};
use med_core::corpus::Corpus;
use med_core::derive_seed;
use med_core::harness::{evaluate, make_celex_folds, reduce_all, reduce_tagpair};
use med_core::med::{check_shared_vocabulary, majority_vote, MedModel};
use med_core::poet::PoetStore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::files::{self, PredictionRow};
use crate::{config, model, report};

#[derive(Debug, Parser)]
#[command(name = "med", version, about = "Morphological reinflection with an attention encoder-decoder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model, or an ensemble when the config sets ensemble_size.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict target forms; several models vote.
    Predict {
        /// Comma-separated model or ensemble directories.
        #[arg(long)]
        model: String,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        beam: Option<usize>,
        /// Seed for breaking voting ties.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Edit-tree based correction of predictions.
    #[command(subcommand)]
    Poet(PoetCommand),
    /// Exact-match accuracy of models on a test file.
    Eval {
        #[arg(long)]
        model: String,
        #[arg(long)]
        test: PathBuf,
        /// Edit-tree store used to correct the voted predictions.
        #[arg(long)]
        poet: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        beam: Option<usize>,
        /// Seed for voting and correction ties.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write five train/dev/test folds.
    Folds {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep a seeded fraction of one tag pair's samples, or of every pair.
    Reduce {
        #[arg(long)]
        data: PathBuf,
        /// Source and target tag joined by a comma.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        fraction: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PoetCommand {
    /// Count the edit trees of a training file.
    Build {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correct a prediction file.
    Apply {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
    },
}

/// Splits `S,T` at the comma that yields a tag pair of `corpus`. Tags may
/// themselves contain commas.
pub fn resolve_pair(corpus: &Corpus, spec: &str) -> anyhow::Result<(String, String)> {
    let matches: Vec<(String, String)> = spec
        .match_indices(',')
        .map(|(i, _)| (spec[..i].to_string(), spec[i + 1..].to_string()))
        .filter(|p| corpus.tag_pairs().contains(p))
        .collect();
    match matches.as_slice() {
        [one] => Ok(one.clone()),
        [] => bail!("no tag pair of the corpus matches {spec:?}"),
        _ => bail!("{spec:?} matches several tag pairs; the split is ambiguous"),
    }
}

fn load_models(spec: &str, beam: Option<usize>) -> anyhow::Result<Vec<MedModel>> {
    let mut models = model::load_all(spec)?;
    if let Some(b) = beam {
        for m in &mut models {
            m.set_beam_width(b)?;
        }
    }
    check_shared_vocabulary(&models)?;
    Ok(models)
}

fn vote_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, b"vote"))
}

fn read_data(path: &Path) -> anyhow::Result<Corpus> {
    Ok(files::read_corpus(path)?)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Train { data, config, seed, out: dir } => {
            let corpus = read_data(&data)?;
            let mut cfg = config::read(&config)?;
            cfg.model.seed = seed;
            let models = model::train_ensemble(&corpus, &cfg)?;
            model::save_all(&dir, &models)?;
            for (i, m) in models.iter().enumerate() {
                let last = m.log().last().map(|e| e.loss).unwrap_or(f64::NAN);
                writeln!(out, "member {i}: {} iterations, final loss {last:.6}", m.log().len())?;
            }
            writeln!(out, "wrote {}", dir.display())?;
        }
        Command::Predict { model: spec, data, out: path, beam, seed } => {
            let models = load_models(&spec, beam)?;
            let corpus = read_data(&data)?;
            let mut rng = vote_rng(seed);
            let rows: Vec<PredictionRow> = corpus
                .samples()
                .iter()
                .map(|s| {
                    let votes: Vec<String> = models.iter().map(|m| m.predict(s)).collect();
                    let winner = majority_vote(&votes, &mut rng).unwrap_or_default();
                    PredictionRow::new(s, &winner)
                })
                .collect();
            files::write_predictions(&path, &rows)?;
            writeln!(out, "{} predictions from {} model(s) -> {}", rows.len(), models.len(), path.display())?;
        }
        Command::Poet(PoetCommand::Build { data, out: path }) => {
            let store = PoetStore::build(&read_data(&data)?)?;
            files::write_store(&path, &store)?;
            writeln!(out, "{} edit trees -> {}", store.entries().count(), path.display())?;
        }
        Command::Poet(PoetCommand::Apply { store, pred, data, out: path, seed }) => {
            let store = files::read_store(&store)?;
            let rows = files::read_predictions(&pred)?;
            let corpus = read_data(&data)?;
            if rows.len() != corpus.len() {
                bail!("{} has {} lines but {} has {}", pred.display(), rows.len(), data.display(), corpus.len());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, b"poet"));
            let mut fixed = Vec::with_capacity(rows.len());
            for (i, (row, s)) in rows.iter().zip(corpus.samples()).enumerate() {
                if !row.matches(s) {
                    bail!("line {}: prediction and data disagree on source form or tags", i + 1);
                }
                let c = store.correct(s.source_form(), s.source_tag(), s.target_tag(), &row.prediction, &mut rng);
                fixed.push(PredictionRow::new(s, &c));
            }
            files::write_predictions(&path, &fixed)?;
            let changed = rows.iter().zip(&fixed).filter(|(a, b)| a.prediction != b.prediction).count();
            writeln!(out, "corrected {changed} of {} predictions -> {}", rows.len(), path.display())?;
            if corpus.has_golds() {
                let acc = |rs: &[PredictionRow]| {
                    let ok = rs
                        .iter()
                        .zip(corpus.samples())
                        .filter(|(r, s)| s.target_form() == Some(r.prediction.as_str()))
                        .count();
                    100.0 * ok as f64 / rs.len().max(1) as f64
                };
                writeln!(out, "accuracy {:.1} -> {:.1}", acc(&rows), acc(&fixed))?;
            }
        }
        Command::Eval { model: spec, test, poet, report: path, beam, seed } => {
            let models = load_models(&spec, beam)?;
            let corpus = read_data(&test)?;
            let store = poet.as_deref().map(files::read_store).transpose()?;
            let mut rng = vote_rng(seed);
            let r = evaluate(&models, &corpus, store.as_ref(), &mut rng)?;
            files::write_text(&path, &report::to_json(&r))?;
            write!(out, "{}", report::to_table(&r))?;
        }
        Command::Folds { data, seed, out: dir } => {
            let corpus = read_data(&data)?;
            let folds = make_celex_folds(&corpus, seed)?;
            if folds.first().is_some_and(|f| f.scaled) {
                eprintln!("warning: some tag pairs have fewer than 2500 samples; fold sizes are scaled down");
            }
            for f in &folds {
                let sub = dir.join(format!("fold-{}", f.index));
                files::write_corpus(&sub.join("train.tsv"), &f.train)?;
                files::write_corpus(&sub.join("dev.tsv"), &f.dev)?;
                files::write_corpus(&sub.join("test.tsv"), &f.test)?;
                writeln!(
                    out,
                    "fold {}: train {} dev {} test {}",
                    f.index,
                    f.train.len(),
                    f.dev.len(),
                    f.test.len()
                )?;
            }
        }
        Command::Reduce { data, pair, fraction, seed, out: path } => {
            let corpus = read_data(&data)?;
            let reduced = match pair {
                Some(spec) => reduce_tagpair(&corpus, &resolve_pair(&corpus, &spec)?, fraction, seed)?,
                None => reduce_all(&corpus, fraction, seed)?,
            };
            files::write_corpus(&path, &reduced)?;
            writeln!(out, "kept {} of {} samples -> {}", reduced.len(), corpus.len(), path.display())?;
        }
    }
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
