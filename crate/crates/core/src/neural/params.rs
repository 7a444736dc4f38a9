use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::gru::GRU_FIELDS;
use super::init::{identity_init, uniform_init, zero_init};
use super::{GruParams, NeuralError, Tensor};

/// Layer sizes of one encoder-decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub input_vocab: usize,
    pub output_vocab: usize,
    pub embedding: usize,
    /// Per direction in the encoder; also the decoder state size.
    pub hidden: usize,
    pub attention: usize,
    /// Width of the maxout layer after taking the maximum.
    pub readout: usize,
    pub maxout_pieces: usize,
}

impl Dims {
    pub fn annotation(&self) -> usize {
        2 * self.hidden
    }

    fn check(&self) -> Result<(), NeuralError> {
        let all = [
            self.input_vocab,
            self.output_vocab,
            self.embedding,
            self.hidden,
            self.attention,
            self.readout,
            self.maxout_pieces,
        ];
        if all.contains(&0) {
            Err(NeuralError::ZeroSized)
        } else {
            Ok(())
        }
    }
}

/// Every trainable tensor of the encoder-decoder.
///
/// The decoder's initial state is `tanh(init_w ←h_1 + init_b)`, computed from
/// the backward encoder state at the first input position. The decoder GRU
/// reads `[embedding(y_prev); context]`. The readout takes the maximum over
/// `maxout_pieces` affine maps of `(s_t, embedding(y_prev), context)`; piece
/// `k` occupies rows `k·readout .. (k+1)·readout` of the `ro_*` tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    dims: Dims,
    pub enc_embed: Tensor,
    pub enc_fwd: GruParams,
    pub enc_bwd: GruParams,
    pub dec_embed: Tensor,
    pub init_w: Tensor,
    pub init_b: Tensor,
    pub dec: GruParams,
    pub att_ws: Tensor,
    pub att_wh: Tensor,
    pub att_v: Tensor,
    pub ro_s: Tensor,
    pub ro_y: Tensor,
    pub ro_c: Tensor,
    pub ro_b: Tensor,
    pub out_w: Tensor,
    pub out_b: Tensor,
}

impl ModelParams {
    /// All tensors zero; the layout used for gradients.
    pub fn zeros(dims: Dims) -> Result<Self, NeuralError> {
        dims.check()?;
        let Dims {
            input_vocab,
            output_vocab,
            embedding: e,
            hidden: h,
            attention: a,
            readout: r,
            maxout_pieces: k,
        } = dims;
        Ok(ModelParams {
            dims,
            enc_embed: zero_init(&[input_vocab, e])?,
            enc_fwd: GruParams::zeros(e, h)?,
            enc_bwd: GruParams::zeros(e, h)?,
            dec_embed: zero_init(&[output_vocab, e])?,
            init_w: zero_init(&[h, h])?,
            init_b: zero_init(&[h])?,
            dec: GruParams::zeros(e + 2 * h, h)?,
            att_ws: zero_init(&[a, h])?,
            att_wh: zero_init(&[a, 2 * h])?,
            att_v: zero_init(&[a])?,
            ro_s: zero_init(&[k * r, h])?,
            ro_y: zero_init(&[k * r, e])?,
            ro_c: zero_init(&[k * r, 2 * h])?,
            ro_b: zero_init(&[k * r])?,
            out_w: zero_init(&[output_vocab, r])?,
            out_b: zero_init(&[output_vocab])?,
        })
    }

    /// Training initialization: every weight matrix, embedding and the
    /// attention vector starts as a (rectangular) identity, except the decoder
    /// GRU weights which are Glorot-uniform; all biases are zero.
    pub fn initialize<R: Rng + ?Sized>(dims: Dims, rng: &mut R) -> Result<Self, NeuralError> {
        let mut p = Self::zeros(dims)?;
        let Dims { embedding: e, hidden: h, .. } = dims;
        p.enc_embed = identity_like(&p.enc_embed)?;
        p.enc_fwd = GruParams::identity(e, h)?;
        p.enc_bwd = GruParams::identity(e, h)?;
        p.dec_embed = identity_like(&p.dec_embed)?;
        p.init_w = identity_like(&p.init_w)?;
        p.dec = GruParams::glorot(e + 2 * h, h, rng)?;
        p.att_ws = identity_like(&p.att_ws)?;
        p.att_wh = identity_like(&p.att_wh)?;
        p.att_v = identity_like(&p.att_v)?;
        p.ro_s = identity_like(&p.ro_s)?;
        p.ro_y = identity_like(&p.ro_y)?;
        p.ro_c = identity_like(&p.ro_c)?;
        p.out_w = identity_like(&p.out_w)?;
        Ok(p)
    }

    /// Every entry (biases included) uniform in `[-scale, scale)`.
    pub fn random<R: Rng + ?Sized>(dims: Dims, scale: f64, rng: &mut R) -> Result<Self, NeuralError> {
        let mut p = Self::zeros(dims)?;
        for t in p.tensors_mut() {
            *t = uniform_init(t.shape(), scale, rng)?;
        }
        Ok(p)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn zeros_like(&self) -> Self {
        let mut g = self.clone();
        g.tensors_mut().into_iter().for_each(|t| t.fill(0.0));
        g
    }

    /// Tensor names in the canonical order of [`ModelParams::tensors`].
    pub fn names() -> Vec<String> {
        let mut names = Vec::with_capacity(45);
        names.push("enc_embed".into());
        for gru in ["enc_fwd", "enc_bwd"] {
            names.extend(GRU_FIELDS.iter().map(|f| format!("{gru}.{f}")));
        }
        names.push("dec_embed".into());
        names.push("init_w".into());
        names.push("init_b".into());
        names.extend(GRU_FIELDS.iter().map(|f| format!("dec.{f}")));
        for n in ["att_ws", "att_wh", "att_v", "ro_s", "ro_y", "ro_c", "ro_b", "out_w", "out_b"] {
            names.push(n.into());
        }
        names
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        let mut v: Vec<&Tensor> = Vec::with_capacity(45);
        v.push(&self.enc_embed);
        v.extend(self.enc_fwd.tensors());
        v.extend(self.enc_bwd.tensors());
        v.push(&self.dec_embed);
        v.push(&self.init_w);
        v.push(&self.init_b);
        v.extend(self.dec.tensors());
        v.extend([
            &self.att_ws,
            &self.att_wh,
            &self.att_v,
            &self.ro_s,
            &self.ro_y,
            &self.ro_c,
            &self.ro_b,
            &self.out_w,
            &self.out_b,
        ]);
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v: Vec<&mut Tensor> = Vec::with_capacity(45);
        v.push(&mut self.enc_embed);
        v.extend(self.enc_fwd.tensors_mut());
        v.extend(self.enc_bwd.tensors_mut());
        v.push(&mut self.dec_embed);
        v.push(&mut self.init_w);
        v.push(&mut self.init_b);
        v.extend(self.dec.tensors_mut());
        v.extend([
            &mut self.att_ws,
            &mut self.att_wh,
            &mut self.att_v,
            &mut self.ro_s,
            &mut self.ro_y,
            &mut self.ro_c,
            &mut self.ro_b,
            &mut self.out_w,
            &mut self.out_b,
        ]);
        v
    }

    /// Rebuilds parameters from tensors in canonical order, checking shapes.
    pub fn from_tensors(dims: Dims, tensors: Vec<Tensor>) -> Result<Self, NeuralError> {
        let mut p = Self::zeros(dims)?;
        let slots = p.tensors_mut();
        if slots.len() != tensors.len() {
            return Err(NeuralError::ShapeMismatch {
                expected: slots.len(),
                found: tensors.len(),
            });
        }
        for (slot, t) in slots.into_iter().zip(tensors) {
            if slot.shape() != t.shape() {
                return Err(NeuralError::ShapeMismatch {
                    expected: slot.len(),
                    found: t.len(),
                });
            }
            *slot = t;
        }
        Ok(p)
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Euclidean norm over all entries.
    pub fn global_norm(&self) -> f64 {
        let sq: f64 = self
            .tensors()
            .iter()
            .flat_map(|t| t.data().iter())
            .map(|v| v * v)
            .sum();
        crate::math::sqrt(sq)
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.data_mut().iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn add_assign(&mut self, other: &ModelParams) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_acc(b.data());
        }
    }
}

fn identity_like(t: &Tensor) -> Result<Tensor, NeuralError> {
    match *t.shape() {
        [rows, cols] => identity_init(rows, cols),
        [n] => Tensor::from_vec(&[n], identity_init(n, 1)?.data().to_vec()),
        _ => unreachable!("parameters are vectors or matrices"),
    }
}
