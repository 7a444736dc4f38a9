//! Exact-match evaluation, fold construction and training-set reduction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Sample};
use crate::med::{check_shared_vocabulary, majority_vote, MedError, Reinflector};
use crate::poet::PoetStore;
use crate::seed::derive_seed;

/// Samples per tag pair in the full fold protocol.
pub const FOLD_POOL: usize = 2500;
pub const FOLD_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum HarnessError {
    LengthMismatch { predictions: usize, golds: usize },
    EmptyEvaluation,
    MissingGold { index: usize },
    TooFewSamples { source_tag: String, target_tag: String, found: usize },
    UnknownPair { source_tag: String, target_tag: String },
    InvalidFraction(f64),
    Med(MedError),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::LengthMismatch { predictions, golds } => {
                write!(f, "{predictions} predictions for {golds} gold forms")
            }
            HarnessError::EmptyEvaluation => write!(f, "nothing to evaluate"),
            HarnessError::MissingGold { index } => write!(f, "test sample {index} has no gold form"),
            HarnessError::TooFewSamples { source_tag, target_tag, found } => write!(
                f,
                "tag pair ({source_tag}, {target_tag}) has {found} samples; folds need at least 3"
            ),
            HarnessError::UnknownPair { source_tag, target_tag } => {
                write!(f, "tag pair ({source_tag}, {target_tag}) does not occur in the corpus")
            }
            HarnessError::InvalidFraction(x) => write!(f, "fraction {x} is not in (0, 1]"),
            HarnessError::Med(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for HarnessError {}

impl From<MedError> for HarnessError {
    fn from(e: MedError) -> Self {
        HarnessError::Med(e)
    }
}

/// Fraction of positions where prediction and gold are identical strings.
pub fn exact_match<P: AsRef<str>, G: AsRef<str>>(predictions: &[P], golds: &[G]) -> Result<f64, HarnessError> {
    if predictions.len() != golds.len() {
        return Err(HarnessError::LengthMismatch {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    if golds.is_empty() {
        return Err(HarnessError::EmptyEvaluation);
    }
    let correct = count_correct(predictions, golds);
    Ok(correct as f64 / golds.len() as f64)
}

fn count_correct<P: AsRef<str>, G: AsRef<str>>(predictions: &[P], golds: &[G]) -> usize {
    predictions
        .iter()
        .zip(golds)
        .filter(|(p, g)| p.as_ref() == g.as_ref())
        .count()
}

fn pair_label(pair: &(String, String)) -> Vec<u8> {
    let mut label = Vec::with_capacity(pair.0.len() + pair.1.len() + 1);
    label.extend_from_slice(pair.0.as_bytes());
    label.push(b'\t');
    label.extend_from_slice(pair.1.as_bytes());
    label
}

/// Seeded permutation of the corpus indices of `pair`.
fn pair_permutation(corpus: &Corpus, pair: &(String, String), seed: u64, purpose: &[u8]) -> Vec<usize> {
    let mut label = purpose.to_vec();
    label.extend(pair_label(pair));
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &label));
    let mut idx = corpus.pair_indices(pair);
    idx.shuffle(&mut rng);
    idx
}

/// One train/dev/test split. Each split lists tag pairs in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSpec {
    pub index: usize,
    pub train: Corpus,
    pub dev: Corpus,
    pub test: Corpus,
    /// True when some tag pair had fewer than [`FOLD_POOL`] samples and its
    /// splits were shrunk proportionally.
    pub scaled: bool,
}

/// Split sizes for a pool of `n` samples: one fifth train, two fifths dev,
/// the rest test.
pub fn fold_sizes(n: usize) -> (usize, usize, usize) {
    let train = (n / 5).max(1);
    let dev = (2 * n / 5).max(1);
    (train, dev, n - train - dev)
}

/// Five folds per tag pair. Each pair's samples are shuffled once and capped
/// at [`FOLD_POOL`]; fold `i` rotates that order by `i·n/5` and cuts it into
/// train, dev and test, so for pairs with at least five samples the training
/// blocks of different folds are disjoint.
pub fn make_celex_folds(data: &Corpus, seed: u64) -> Result<Vec<FoldSpec>, HarnessError> {
    let mut splits: Vec<[Vec<Sample>; 3]> = (0..FOLD_COUNT).map(|_| Default::default()).collect();
    let mut scaled = false;
    for pair in data.tag_pairs() {
        let mut order = pair_permutation(data, pair, seed, b"folds\t");
        if order.len() < 3 {
            return Err(HarnessError::TooFewSamples {
                source_tag: pair.0.clone(),
                target_tag: pair.1.clone(),
                found: order.len(),
            });
        }
        scaled |= order.len() < FOLD_POOL;
        order.truncate(FOLD_POOL);
        let n = order.len();
        let (train, dev, _) = fold_sizes(n);
        for (fold, split) in splits.iter_mut().enumerate() {
            let shift = fold * n / FOLD_COUNT;
            for (pos, k) in (0..n).map(|j| order[(j + shift) % n]).enumerate() {
                let which = if pos < train {
                    0
                } else if pos < train + dev {
                    1
                } else {
                    2
                };
                split[which].push(data.samples()[k].clone());
            }
        }
    }
    Ok(splits
        .into_iter()
        .enumerate()
        .map(|(index, [train, dev, test])| FoldSpec {
            index,
            train: Corpus::new(train),
            dev: Corpus::new(dev),
            test: Corpus::new(test),
            scaled,
        })
        .collect())
}

/// `ceil(fraction·n)`, treating values within rounding noise of an integer
/// as that integer.
pub fn reduced_count(n: usize, fraction: f64) -> usize {
    let x = fraction * n as f64;
    let r = libm::round(x);
    if libm::fabs(x - r) < 1e-9 * (1.0 + x) {
        r as usize
    } else {
        libm::ceil(x) as usize
    }
}

fn check_fraction(fraction: f64) -> Result<(), HarnessError> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(HarnessError::InvalidFraction(fraction))
    }
}

fn keep_mask(corpus: &Corpus, pair: &(String, String), fraction: f64, seed: u64, keep: &mut [bool]) {
    let order = pair_permutation(corpus, pair, seed, b"reduce\t");
    let k = reduced_count(order.len(), fraction);
    for &i in &order[k..] {
        keep[i] = false;
    }
}

fn filtered(corpus: &Corpus, keep: &[bool]) -> Corpus {
    Corpus::new(
        corpus
            .samples()
            .iter()
            .zip(keep)
            .filter(|(_, k)| **k)
            .map(|(s, _)| s.clone())
            .collect(),
    )
}

/// Keeps `ceil(fraction·n)` seeded-random samples of `pair` and every sample
/// of other pairs, in corpus order. For one seed, smaller fractions keep
/// subsets of what larger fractions keep.
pub fn reduce_tagpair(
    corpus: &Corpus,
    pair: &(String, String),
    fraction: f64,
    seed: u64,
) -> Result<Corpus, HarnessError> {
    check_fraction(fraction)?;
    if !corpus.tag_pairs().contains(pair) {
        return Err(HarnessError::UnknownPair {
            source_tag: pair.0.clone(),
            target_tag: pair.1.clone(),
        });
    }
    let mut keep = alloc::vec![true; corpus.len()];
    keep_mask(corpus, pair, fraction, seed, &mut keep);
    Ok(filtered(corpus, &keep))
}

/// [`reduce_tagpair`] applied to every pair with the same seed.
pub fn reduce_all(corpus: &Corpus, fraction: f64, seed: u64) -> Result<Corpus, HarnessError> {
    check_fraction(fraction)?;
    let mut keep = alloc::vec![true; corpus.len()];
    for pair in corpus.tag_pairs() {
        keep_mask(corpus, pair, fraction, seed, &mut keep);
    }
    Ok(filtered(corpus, &keep))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub source_tag: String,
    pub target_tag: String,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub corrected: Option<usize>,
    pub corrected_accuracy: Option<f64>,
    /// Corrected minus uncorrected accuracy.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub total: usize,
    pub member_accuracies: Vec<f64>,
    pub member_mean: f64,
    /// Sample standard deviation; 0 for a single member.
    pub member_std: f64,
    /// Whether predictions come from a majority vote over several members.
    pub ensemble: bool,
    pub correct: usize,
    pub accuracy: f64,
    pub corrected: Option<usize>,
    pub corrected_accuracy: Option<f64>,
    pub delta: Option<f64>,
    pub per_pair: Vec<PairReport>,
    /// Voted prediction per test sample.
    pub predictions: Vec<String>,
    /// Prediction per test sample after correction.
    pub corrected_predictions: Option<Vec<String>>,
}

fn golds(test: &Corpus) -> Result<Vec<&str>, HarnessError> {
    test.samples()
        .iter()
        .enumerate()
        .map(|(index, s)| s.target_form().ok_or(HarnessError::MissingGold { index }))
        .collect()
}

/// Predicts `test` with every member and scores the result; see
/// [`evaluate_predictions`].
pub fn evaluate<M: Reinflector, R: Rng + ?Sized>(
    models: &[M],
    test: &Corpus,
    poet: Option<&PoetStore>,
    rng: &mut R,
) -> Result<EvalReport, HarnessError> {
    check_shared_vocabulary(models)?;
    golds(test)?;
    let members: Vec<Vec<String>> = models
        .iter()
        .map(|m| test.samples().iter().map(|s| m.reinflect(s)).collect())
        .collect();
    evaluate_predictions(test, &members, poet, rng)
}

/// Scores per-member predictions, their majority vote and, when a store is
/// given, the corrected vote. `rng` breaks voting ties sample by sample and
/// then correction ties sample by sample.
pub fn evaluate_predictions<R: Rng + ?Sized>(
    test: &Corpus,
    members: &[Vec<String>],
    poet: Option<&PoetStore>,
    rng: &mut R,
) -> Result<EvalReport, HarnessError> {
    let golds = golds(test)?;
    if members.is_empty() {
        return Err(MedError::NoModels.into());
    }
    let member_accuracies = members
        .iter()
        .map(|p| exact_match(p, &golds))
        .collect::<Result<Vec<_>, _>>()?;
    let k = member_accuracies.len() as f64;
    let member_mean = member_accuracies.iter().sum::<f64>() / k;
    let member_std = if members.len() < 2 {
        0.0
    } else {
        let ss: f64 = member_accuracies.iter().map(|a| (a - member_mean) * (a - member_mean)).sum();
        libm::sqrt(ss / (k - 1.0))
    };

    let predictions: Vec<String> = (0..golds.len())
        .map(|i| {
            let votes: Vec<&str> = members.iter().map(|m| m[i].as_str()).collect();
            majority_vote(&votes, rng).unwrap_or_default()
        })
        .collect();
    let corrected_predictions: Option<Vec<String>> = poet.map(|store| {
        test.samples()
            .iter()
            .zip(&predictions)
            .map(|(s, p)| store.correct(s.source_form(), s.source_tag(), s.target_tag(), p, rng))
            .collect()
    });

    let total = golds.len();
    let correct = count_correct(&predictions, &golds);
    let corrected = corrected_predictions.as_ref().map(|c| count_correct(c, &golds));
    let accuracy = correct as f64 / total as f64;
    let corrected_accuracy = corrected.map(|c| c as f64 / total as f64);

    let mut tallies: BTreeMap<(String, String), [usize; 3]> = BTreeMap::new();
    for (i, s) in test.samples().iter().enumerate() {
        let t = tallies.entry(s.tag_pair()).or_default();
        t[0] += 1;
        t[1] += usize::from(predictions[i] == golds[i]);
        if let Some(c) = &corrected_predictions {
            t[2] += usize::from(c[i] == golds[i]);
        }
    }
    let per_pair = tallies
        .into_iter()
        .map(|((source_tag, target_tag), [n, ok, fixed])| {
            let accuracy = ok as f64 / n as f64;
            let corrected = corrected.map(|_| fixed);
            let corrected_accuracy = corrected.map(|c| c as f64 / n as f64);
            PairReport {
                source_tag,
                target_tag,
                total: n,
                correct: ok,
                accuracy,
                corrected,
                corrected_accuracy,
                delta: corrected_accuracy.map(|c| c - accuracy),
            }
        })
        .collect();

    Ok(EvalReport {
        total,
        member_accuracies,
        member_mean,
        member_std,
        ensemble: members.len() > 1,
        correct,
        accuracy,
        corrected,
        corrected_accuracy,
        delta: corrected_accuracy.map(|c| c - accuracy),
        per_pair,
        predictions,
        corrected_predictions,
    })
}
