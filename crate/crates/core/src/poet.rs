//! Output correction with observed edit trees.
//!
//! For every (source tag, target tag) pair the store keeps the edit trees that
//! turn training source forms into training target forms, with counts. A
//! prediction whose own edit tree was observed for its tag pair is kept. An
//! unobserved prediction is replaced by a form at Levenshtein distance one whose
//! edit tree was observed, preferring the most frequent tree; otherwise it is
//! kept.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::corpus::Corpus;
use crate::edittree::{levenshtein_chars, EditTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoetError {
    MissingTarget { index: usize },
    ZeroFrequency,
}

impl fmt::Display for PoetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoetError::MissingTarget { index } => {
                write!(f, "sample {index} has no target form")
            }
            PoetError::ZeroFrequency => write!(f, "edit tree frequency must be at least 1"),
        }
    }
}

impl core::error::Error for PoetError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedTree {
    pub tree: EditTree,
    pub frequency: u64,
}

/// A corrected-form candidate and the observed tree supporting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub form: String,
    pub key: String,
    pub frequency: u64,
}

type TagPair = (String, String);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PoetStore {
    pairs: BTreeMap<TagPair, BTreeMap<String, ObservedTree>>,
}

impl PoetStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts the edit tree of every training sample under its tag pair.
    pub fn build(corpus: &Corpus) -> Result<Self, PoetError> {
        let mut store = PoetStore::new();
        for (index, s) in corpus.samples().iter().enumerate() {
            let target = s.target_form().ok_or(PoetError::MissingTarget { index })?;
            let tree = EditTree::build(s.source_form(), target);
            store.add(s.source_tag(), s.target_tag(), tree, 1)?;
        }
        Ok(store)
    }

    pub fn add(
        &mut self,
        source_tag: &str,
        target_tag: &str,
        tree: EditTree,
        count: u64,
    ) -> Result<(), PoetError> {
        if count == 0 {
            return Err(PoetError::ZeroFrequency);
        }
        let key = tree.canonical_key();
        self.pairs
            .entry((source_tag.into(), target_tag.into()))
            .or_default()
            .entry(key)
            .and_modify(|o| o.frequency += count)
            .or_insert(ObservedTree {
                tree,
                frequency: count,
            });
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Observed trees for one tag pair, keyed by canonical key.
    pub fn trees(&self, source_tag: &str, target_tag: &str) -> Option<&BTreeMap<String, ObservedTree>> {
        // BTreeMap lookups need an owned tuple key.
        self.pairs.get(&(source_tag.into(), target_tag.into()))
    }

    pub fn frequency(&self, source_tag: &str, target_tag: &str, key: &str) -> u64 {
        self.trees(source_tag, target_tag)
            .and_then(|m| m.get(key))
            .map_or(0, |o| o.frequency)
    }

    /// `(source_tag, target_tag, key, frequency)` rows in sorted order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str, u64)> {
        self.pairs.iter().flat_map(|((s, t), trees)| {
            trees
                .iter()
                .map(move |(k, o)| (s.as_str(), t.as_str(), k.as_str(), o.frequency))
        })
    }

    /// Whether the edit tree from `source` to `form` was observed for the pair.
    pub fn supports(&self, source: &str, source_tag: &str, target_tag: &str, form: &str) -> bool {
        self.trees(source_tag, target_tag).is_some_and(|m| {
            m.contains_key(&EditTree::build(source, form).canonical_key())
        })
    }

    /// Forms at distance one from `prediction` whose edit tree from `source`
    /// was observed for the pair, most frequent tree first, then by key.
    ///
    /// Each observed tree is applied to `source`; results at distance one are
    /// kept only if rebuilding their edit tree lands in the store again, since
    /// an applicable tree need not be the tree the builder would produce.
    pub fn candidates(
        &self,
        source: &str,
        source_tag: &str,
        target_tag: &str,
        prediction: &str,
    ) -> Vec<Candidate> {
        let Some(trees) = self.trees(source_tag, target_tag) else {
            return Vec::new();
        };
        let predicted: Vec<char> = prediction.chars().collect();
        let mut found: BTreeMap<String, Candidate> = BTreeMap::new();
        for observed in trees.values() {
            let Some(form) = observed.tree.apply(source) else {
                continue;
            };
            if found.contains_key(&form) {
                continue;
            }
            let chars: Vec<char> = form.chars().collect();
            if levenshtein_chars(&predicted, &chars) != 1 {
                continue;
            }
            let key = EditTree::build(source, &form).canonical_key();
            if let Some(support) = trees.get(&key) {
                let frequency = support.frequency;
                found.insert(form.clone(), Candidate { form, key, frequency });
            }
        }
        let mut out: Vec<Candidate> = found.into_values().collect();
        out.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.key.cmp(&b.key)));
        out
    }

    /// Corrected form for `prediction`. Ties between equally frequent
    /// candidates are drawn uniformly from `rng`.
    pub fn correct<R: Rng + ?Sized>(
        &self,
        source: &str,
        source_tag: &str,
        target_tag: &str,
        prediction: &str,
        rng: &mut R,
    ) -> String {
        if self.trees(source_tag, target_tag).is_none()
            || self.supports(source, source_tag, target_tag, prediction)
        {
            return prediction.into();
        }
        let candidates = self.candidates(source, source_tag, target_tag, prediction);
        let Some(top) = candidates.first().map(|c| c.frequency) else {
            return prediction.into();
        };
        let tied = candidates.iter().take_while(|c| c.frequency == top).count();
        let pick = if tied == 1 { 0 } else { rng.gen_range(0..tied) };
        candidates[pick].form.clone()
    }
}
