//! Numerical building blocks of the encoder-decoder.
//!
//! Everything runs in `f64` on plain row-major buffers. The forward pass over
//! one (input, target) pair records the intermediates needed by the
//! hand-written reverse pass in [`network::backward`].

use core::fmt;

mod adadelta;
mod attention;
mod gru;
mod init;
pub mod network;
mod params;
mod tensor;

pub use adadelta::{clip_global_norm, AdadeltaConfig, AdadeltaState};
pub use attention::attention;
pub use gru::{gru_step, GruParams};
pub use init::{glorot_uniform, identity_init, uniform_init, zero_init};
pub use network::{
    backward, decoder_step, encode_bidirectional, forward, softmax_xent, Encoded, SequenceTrace,
};
pub use params::{Dims, ModelParams};
pub use tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NeuralError {
    ZeroSized,
    ShapeMismatch { expected: usize, found: usize },
    UnknownToken { id: usize, vocab: usize },
    EmptySequence,
    GoldOutOfRange { id: usize, classes: usize },
}

impl fmt::Display for NeuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeuralError::ZeroSized => write!(f, "tensor dimensions must be non-zero"),
            NeuralError::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected} values, found {found}")
            }
            NeuralError::UnknownToken { id, vocab } => {
                write!(f, "token id {id} outside vocabulary of size {vocab}")
            }
            NeuralError::EmptySequence => write!(f, "sequence is empty"),
            NeuralError::GoldOutOfRange { id, classes } => {
                write!(f, "gold id {id} outside {classes} classes")
            }
        }
    }
}

impl core::error::Error for NeuralError {}

pub(crate) fn check_len(v: &[f64], expected: usize) -> Result<(), NeuralError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(NeuralError::ShapeMismatch {
            expected,
            found: v.len(),
        })
    }
}
