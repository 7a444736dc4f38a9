//! The reinflection model: one attention encoder-decoder trained on the
//! samples of every tag pair at once, plus decoding and ensemble voting.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusError, Sample, Vocabulary, END_ID, START_ID};
use crate::corpus::Corpus;
use crate::neural::{
    backward, clip_global_norm, forward, AdadeltaConfig, AdadeltaState, Dims, Encoded, ModelParams,
    NeuralError,
};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub enum MedError {
    Corpus(CorpusError),
    Neural(NeuralError),
    InvalidConfig(&'static str),
    MissingTarget { index: usize },
    NonFiniteLoss { iteration: usize },
    VocabularyMismatch,
    NoModels,
}

impl fmt::Display for MedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MedError::Corpus(e) => write!(f, "{e}"),
            MedError::Neural(e) => write!(f, "{e}"),
            MedError::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            MedError::MissingTarget { index } => write!(f, "training sample {index} has no target form"),
            MedError::NonFiniteLoss { iteration } => {
                write!(f, "training loss became non-finite at iteration {iteration}")
            }
            MedError::VocabularyMismatch => write!(f, "ensemble members use different vocabularies"),
            MedError::NoModels => write!(f, "no models given"),
        }
    }
}

impl core::error::Error for MedError {}

impl From<CorpusError> for MedError {
    fn from(e: CorpusError) -> Self {
        MedError::Corpus(e)
    }
}

impl From<NeuralError> for MedError {
    fn from(e: NeuralError) -> Self {
        MedError::Neural(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedConfig {
    pub hidden_size: usize,
    pub embedding_size: usize,
    pub maxout_pieces: usize,
    pub minibatch_size: usize,
    /// Number of minibatch updates.
    pub iterations: usize,
    /// Global gradient norm threshold; `None` disables clipping.
    pub clip_norm: Option<f64>,
    pub adadelta: AdadeltaConfig,
    /// Maximum number of decoder steps; `None` means input length + 10.
    pub max_decode_length: Option<usize>,
    /// 1 decodes greedily.
    pub beam_width: usize,
    pub seed: u64,
}

impl Default for MedConfig {
    fn default() -> Self {
        MedConfig {
            hidden_size: 100,
            embedding_size: 100,
            maxout_pieces: 2,
            minibatch_size: 20,
            iterations: 20_000,
            clip_norm: Some(1.0),
            adadelta: AdadeltaConfig::default(),
            max_decode_length: None,
            beam_width: 1,
            seed: 0,
        }
    }
}

impl MedConfig {
    pub fn validate(&self) -> Result<(), MedError> {
        let sizes = [
            self.hidden_size,
            self.embedding_size,
            self.maxout_pieces,
            self.minibatch_size,
            self.beam_width,
        ];
        if sizes.contains(&0) {
            return Err(MedError::InvalidConfig("sizes must be at least 1"));
        }
        if self.max_decode_length.is_some_and(|m| m < 2) {
            return Err(MedError::InvalidConfig("max_decode_length must be at least 2"));
        }
        if !(self.adadelta.rho > 0.0 && self.adadelta.rho < 1.0) {
            return Err(MedError::InvalidConfig("adadelta rho must lie in (0, 1)"));
        }
        if !(self.adadelta.epsilon > 0.0) {
            return Err(MedError::InvalidConfig("adadelta epsilon must be positive"));
        }
        if self.clip_norm.is_some_and(|c| !(c > 0.0)) {
            return Err(MedError::InvalidConfig("clip_norm must be positive"));
        }
        Ok(())
    }

    pub fn dims(&self, vocab: &Vocabulary) -> Dims {
        Dims {
            input_vocab: vocab.input().len(),
            output_vocab: vocab.output().len(),
            embedding: self.embedding_size,
            hidden: self.hidden_size,
            attention: self.hidden_size,
            readout: self.hidden_size,
            maxout_pieces: self.maxout_pieces,
        }
    }
}

/// Mean minibatch loss after one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub iteration: usize,
    pub loss: f64,
}

/// Anything that maps a sample to a predicted target form.
pub trait Reinflector {
    fn reinflect(&self, sample: &Sample) -> String;

    /// Vocabulary shared by ensemble members, if the predictor has one.
    fn vocabulary(&self) -> Option<&Vocabulary> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedModel {
    vocab: Vocabulary,
    params: ModelParams,
    config: MedConfig,
    log: Vec<LogEntry>,
}

impl MedModel {
    /// Freshly initialized, untrained model.
    pub fn new(vocab: Vocabulary, config: MedConfig) -> Result<Self, MedError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, b"init"));
        let params = ModelParams::initialize(config.dims(&vocab), &mut rng)?;
        Ok(MedModel {
            vocab,
            params,
            config,
            log: Vec::new(),
        })
    }

    /// Reassembles a model from stored parts.
    pub fn from_parts(
        vocab: Vocabulary,
        params: ModelParams,
        config: MedConfig,
        log: Vec<LogEntry>,
    ) -> Result<Self, MedError> {
        config.validate()?;
        if params.dims() != config.dims(&vocab) {
            return Err(MedError::InvalidConfig("parameter shapes do not match configuration"));
        }
        Ok(MedModel {
            vocab,
            params,
            config,
            log,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &MedConfig {
        &self.config
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Sets the decoding beam width used by [`MedModel::predict`].
    pub fn set_beam_width(&mut self, beam_width: usize) -> Result<(), MedError> {
        if beam_width == 0 {
            return Err(MedError::InvalidConfig("sizes must be at least 1"));
        }
        self.config.beam_width = beam_width;
        Ok(())
    }

    pub fn predict(&self, sample: &Sample) -> String {
        self.decode(sample, self.config.beam_width).text
    }

    /// Decodes `sample` with the given beam width (1 is greedy).
    pub fn decode(&self, sample: &Sample, beam_width: usize) -> Prediction {
        let input = self.vocab.encode_input(sample);
        let limit = self.config.max_decode_length.unwrap_or(input.len() + 10);
        // Input ids come from this model's vocabulary and are never empty.
        let encoded = Encoded::new(&self.params, &input).expect("valid encoder input");
        let (ids, terminated) = if beam_width <= 1 {
            greedy(&self.params, &encoded, limit)
        } else {
            beam_search(&self.params, &encoded, limit, beam_width)
        };
        let decoded = self.vocab.decode_output(&ids);
        Prediction {
            text: decoded.text,
            terminated: terminated && decoded.terminated,
        }
    }
}

impl Reinflector for MedModel {
    fn reinflect(&self, sample: &Sample) -> String {
        self.predict(sample)
    }

    fn vocabulary(&self) -> Option<&Vocabulary> {
        Some(&self.vocab)
    }
}

/// Decoded form and whether the end symbol was produced within the length cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub text: String,
    pub terminated: bool,
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn greedy(p: &ModelParams, encoded: &Encoded, limit: usize) -> (Vec<usize>, bool) {
    let mut state = encoded.initial_state.clone();
    let mut y = START_ID;
    let mut out = Vec::new();
    for _ in 0..limit {
        let (next, logits) = encoded.step(p, y, &state).expect("ids within vocabulary");
        state = next;
        y = argmax(&logits);
        out.push(y);
        if y == END_ID {
            return (out, true);
        }
    }
    (out, false)
}

struct Hypothesis {
    score: f64,
    tokens: Vec<usize>,
    state: Vec<f64>,
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|l| libm::exp(l - max)).sum();
    let lse = max + libm::log(sum);
    logits.iter().map(|l| l - lse).collect()
}

fn beam_search(p: &ModelParams, encoded: &Encoded, limit: usize, width: usize) -> (Vec<usize>, bool) {
    let mut alive = alloc::vec![Hypothesis {
        score: 0.0,
        tokens: Vec::new(),
        state: encoded.initial_state.clone(),
    }];
    let mut finished: Vec<Hypothesis> = Vec::new();
    for _ in 0..limit {
        // (score, logit, parent, token) for every expansion.
        let mut expansions: Vec<(f64, f64, usize, usize, Vec<f64>)> = Vec::new();
        for (h, hyp) in alive.iter().enumerate() {
            let y = hyp.tokens.last().copied().unwrap_or(START_ID);
            let (state, logits) = encoded.step(p, y, &hyp.state).expect("ids within vocabulary");
            let logp = log_softmax(&logits);
            for (tok, lp) in logp.iter().enumerate() {
                expansions.push((hyp.score + lp, logits[tok], h, tok, state.clone()));
            }
        }
        expansions.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then(b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
                .then(a.2.cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        expansions.truncate(width.saturating_sub(finished.len()).max(1));
        let mut next = Vec::new();
        for (score, _, parent, tok, state) in expansions {
            let mut tokens = alive[parent].tokens.clone();
            tokens.push(tok);
            let hyp = Hypothesis { score, tokens, state };
            if tok == END_ID {
                finished.push(hyp);
            } else {
                next.push(hyp);
            }
        }
        alive = next;
        if alive.is_empty() || finished.len() >= width {
            break;
        }
        // No alive hypothesis can overtake the best finished one: scores only decrease.
        if let Some(best) = finished.iter().map(|h| h.score).reduce(f64::max) {
            if alive.iter().all(|h| h.score < best) {
                break;
            }
        }
    }
    let pick = |hs: Vec<Hypothesis>| {
        hs.into_iter()
            .reduce(|a, b| if b.score > a.score { b } else { a })
    };
    match pick(finished) {
        Some(h) => (h.tokens, true),
        None => (pick(alive).map(|h| h.tokens).unwrap_or_default(), false),
    }
}

/// Trains a fresh model on every sample of `corpus` with Adadelta over
/// shuffled minibatches. The loss of a minibatch is the mean per-sequence
/// cross-entropy.
pub fn train(corpus: &Corpus, config: &MedConfig) -> Result<MedModel, MedError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(MedError::Corpus(CorpusError::EmptyCorpus));
    }
    let vocab = Vocabulary::build(corpus)?;
    let mut model = MedModel::new(vocab, config.clone())?;
    let pairs = corpus
        .samples()
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let gold = s.target_form().ok_or(MedError::MissingTarget { index })?;
            Ok((model.vocab.encode_input(s), model.vocab.encode_output(gold)?))
        })
        .collect::<Result<Vec<_>, MedError>>()?;

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, b"shuffle"));
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(&mut shuffle_rng);
    let mut cursor = 0;

    let mut optimizer = AdadeltaState::new(config.adadelta, &model.params);
    let mut grads = model.params.zeros_like();
    let batch = config.minibatch_size;
    for iteration in 1..=config.iterations {
        grads.tensors_mut().into_iter().for_each(|t| t.fill(0.0));
        let mut loss = 0.0;
        for _ in 0..batch {
            if cursor == order.len() {
                order.shuffle(&mut shuffle_rng);
                cursor = 0;
            }
            let (input, target) = &pairs[order[cursor]];
            cursor += 1;
            let trace = forward(&model.params, input, target)?;
            loss += trace.loss;
            backward(&model.params, &trace, &mut grads);
        }
        loss /= batch as f64;
        if !loss.is_finite() {
            return Err(MedError::NonFiniteLoss { iteration });
        }
        grads.scale(1.0 / batch as f64);
        if let Some(c) = config.clip_norm {
            clip_global_norm(&mut grads, c);
        }
        optimizer.update(&mut model.params, &grads);
        model.log.push(LogEntry { iteration, loss });
    }
    Ok(model)
}

/// Most frequent string; ties are drawn uniformly from `rng`. Returns `None`
/// for an empty slice.
pub fn majority_vote<S: AsRef<str>, R: Rng + ?Sized>(predictions: &[S], rng: &mut R) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in predictions {
        *counts.entry(p.as_ref()).or_default() += 1;
    }
    let top = *counts.values().max()?;
    let modal: Vec<&str> = counts
        .into_iter()
        .filter(|(_, c)| *c == top)
        .map(|(s, _)| s)
        .collect();
    let pick = if modal.len() == 1 { 0 } else { rng.gen_range(0..modal.len()) };
    Some(modal[pick].into())
}

/// Majority vote over the members' predictions for `sample`.
pub fn ensemble_predict<M: Reinflector, R: Rng + ?Sized>(
    models: &[M],
    sample: &Sample,
    rng: &mut R,
) -> Result<String, MedError> {
    check_shared_vocabulary(models)?;
    let predictions: Vec<String> = models.iter().map(|m| m.reinflect(sample)).collect();
    majority_vote(&predictions, rng).ok_or(MedError::NoModels)
}

pub fn check_shared_vocabulary<M: Reinflector>(models: &[M]) -> Result<(), MedError> {
    let first = models.first().ok_or(MedError::NoModels)?;
    if models.iter().any(|m| m.vocabulary() != first.vocabulary()) {
        return Err(MedError::VocabularyMismatch);
    }
    Ok(())
}
