//! Flat `key = value` configuration files.
//!
//! ```text
//! # comments and blank lines are ignored
//! hidden_size = 100
//! clip_norm = 1.0          # or "none"
//! max_decode_length = auto # or a number
//! ensemble_size = 5
//! ```
//!
//! Keys mirror [`MedConfig`] fields; `adadelta_rho` and `adadelta_epsilon`
//! set the optimizer. `ensemble_size` is the number of members `med train`
//! writes.

use std::path::Path;
use std::str::FromStr;

use med_core::med::MedConfig;

use crate::{files, format_err, Result};

pub const KEYS: [&str; 12] = [
    "hidden_size",
    "embedding_size",
    "maxout_pieces",
    "minibatch_size",
    "iterations",
    "clip_norm",
    "adadelta_rho",
    "adadelta_epsilon",
    "max_decode_length",
    "beam_width",
    "seed",
    "ensemble_size",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub model: MedConfig,
    pub ensemble_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: MedConfig::default(),
            ensemble_size: 1,
        }
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

impl TrainConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let m = &mut self.model;
        match key {
            "hidden_size" => m.hidden_size = number(key, value)?,
            "embedding_size" => m.embedding_size = number(key, value)?,
            "maxout_pieces" => m.maxout_pieces = number(key, value)?,
            "minibatch_size" => m.minibatch_size = number(key, value)?,
            "iterations" => m.iterations = number(key, value)?,
            "clip_norm" => {
                m.clip_norm = match value {
                    "none" => None,
                    v => Some(number(key, v)?),
                }
            }
            "adadelta_rho" => m.adadelta.rho = number(key, value)?,
            "adadelta_epsilon" => m.adadelta.epsilon = number(key, value)?,
            "max_decode_length" => {
                m.max_decode_length = match value {
                    "auto" => None,
                    v => Some(number(key, v)?),
                }
            }
            "beam_width" => m.beam_width = number(key, value)?,
            "seed" => m.seed = number(key, value)?,
            "ensemble_size" => {
                self.ensemble_size = number(key, value)?;
                if self.ensemble_size == 0 {
                    return Err("ensemble_size must be at least 1".into());
                }
            }
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut config = TrainConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        config.model.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    /// Settings in [`KEYS`] order; parsing the rendered text gives the
    /// same configuration back.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let m = &self.model;
        let opt = |v: Option<String>, none: &str| v.unwrap_or_else(|| none.into());
        vec![
            ("hidden_size", m.hidden_size.to_string()),
            ("embedding_size", m.embedding_size.to_string()),
            ("maxout_pieces", m.maxout_pieces.to_string()),
            ("minibatch_size", m.minibatch_size.to_string()),
            ("iterations", m.iterations.to_string()),
            ("clip_norm", opt(m.clip_norm.map(|c| c.to_string()), "none")),
            ("adadelta_rho", m.adadelta.rho.to_string()),
            ("adadelta_epsilon", m.adadelta.epsilon.to_string()),
            ("max_decode_length", opt(m.max_decode_length.map(|c| c.to_string()), "auto")),
            ("beam_width", m.beam_width.to_string()),
            ("seed", m.seed.to_string()),
            ("ensemble_size", self.ensemble_size.to_string()),
        ]
    }

    pub fn render(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

pub fn read(path: &Path) -> Result<TrainConfig> {
    TrainConfig::parse(&files::read_text(path)?).map_err(|e| format_err(path, e))
}
