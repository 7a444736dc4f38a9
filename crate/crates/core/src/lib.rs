//! Morphological reinflection without the standard library.
//!
//! The crate contains everything that is pure computation:
//!
//! - [`corpus`]: reinflection samples, tag decomposition and the single-sequence
//!   input encoding (`<w> IN=.. OUT=.. c h a r s </w>`).
//! - [`edittree`]: longest-common-substring edit trees and Levenshtein distance.
//! - [`poet`]: correction of predicted forms against the edit trees observed in
//!   training, per tag pair.
//! - [`neural`]: tensors, GRU cells, attention, maxout readout, exact gradients
//!   and Adadelta.
//! - [`med`]: the encoder-decoder trained jointly over all tag pairs, decoding and
//!   ensembles.
//! - [`harness`]: exact-match evaluation, fold construction and training-set
//!   reduction.
//!
//! File formats, checkpoints and the command-line interface live in the `med`
//! crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod edittree;
pub mod harness;
pub mod med;
pub mod neural;
pub mod poet;

mod math;
mod seed;

pub use corpus::{Corpus, Sample, Side, Vocabulary};
pub use edittree::EditTree;
pub use med::{MedConfig, MedModel};
pub use poet::PoetStore;
pub use seed::derive_seed;
