//! Forward and reverse passes of the attention encoder-decoder over one
//! sequence pair.

use alloc::vec;
use alloc::vec::Vec;

use super::attention::{
    attention_backward, attention_forward, project_annotations, softmax_in_place, AttentionCache,
};
use super::gru::{gru_backward, gru_forward, GruCache};
use super::{check_len, ModelParams, NeuralError};
use crate::math::{ln, tanh};

/// Encoder output for one input sequence, with the intermediates the reverse
/// pass needs.
#[derive(Debug, Clone)]
pub struct Encoded {
    input: Vec<usize>,
    forward: Vec<GruCache>,
    backward: Vec<GruCache>,
    /// `[→h_j; ←h_j]` for each input position.
    pub annotations: Vec<Vec<f64>>,
    projected: Vec<Vec<f64>>,
    /// Decoder state before the first output symbol.
    pub initial_state: Vec<f64>,
}

impl Encoded {
    /// Runs both encoder directions over `input`.
    pub fn new(p: &ModelParams, input: &[usize]) -> Result<Self, NeuralError> {
        if input.is_empty() {
            return Err(NeuralError::EmptySequence);
        }
        let vocab = p.dims().input_vocab;
        if let Some(&id) = input.iter().find(|&&id| id >= vocab) {
            return Err(NeuralError::UnknownToken { id, vocab });
        }
        let h = p.dims().hidden;

        let mut state = vec![0.0; h];
        let mut forward = Vec::with_capacity(input.len());
        for &id in input {
            let c = gru_forward(&p.enc_fwd, p.enc_embed.row(id), &state);
            state.clone_from(&c.h);
            forward.push(c);
        }
        state.iter_mut().for_each(|v| *v = 0.0);
        let mut backward = Vec::with_capacity(input.len());
        for &id in input.iter().rev() {
            let c = gru_forward(&p.enc_bwd, p.enc_embed.row(id), &state);
            state.clone_from(&c.h);
            backward.push(c);
        }
        backward.reverse();

        let annotations: Vec<Vec<f64>> = forward
            .iter()
            .zip(&backward)
            .map(|(f, b)| f.h.iter().chain(&b.h).copied().collect())
            .collect();
        let projected = project_annotations(&p.att_wh, &annotations);
        let mut initial_state = p.init_b.data().to_vec();
        p.init_w.matvec_acc(&backward[0].h, &mut initial_state);
        initial_state.iter_mut().for_each(|v| *v = tanh(*v));

        Ok(Encoded {
            input: input.to_vec(),
            forward,
            backward,
            annotations,
            projected,
            initial_state,
        })
    }

    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }

    /// One decoder step from state `s_prev` after emitting `y_prev`: attends
    /// with `s_prev`, updates the state and returns `(s_t, logits)`.
    pub fn step(
        &self,
        p: &ModelParams,
        y_prev: usize,
        s_prev: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>), NeuralError> {
        check_y(p, y_prev)?;
        check_len(s_prev, p.dims().hidden)?;
        let att = attention_forward(p, s_prev, &self.annotations, &self.projected);
        let step = decoder_forward(p, y_prev, s_prev, &att.context);
        Ok((step.gru.h, step.logits))
    }
}

fn check_y(p: &ModelParams, y: usize) -> Result<(), NeuralError> {
    let vocab = p.dims().output_vocab;
    if y >= vocab {
        Err(NeuralError::UnknownToken { id: y, vocab })
    } else {
        Ok(())
    }
}

/// Annotations `[→h_j; ←h_j]` of a non-empty input sequence.
pub fn encode_bidirectional(p: &ModelParams, input: &[usize]) -> Result<Vec<Vec<f64>>, NeuralError> {
    Encoded::new(p, input).map(|e| e.annotations)
}

#[derive(Debug, Clone)]
struct DecoderStep {
    gru: GruCache,
    /// Winning piece per maxout unit.
    piece: Vec<usize>,
    readout: Vec<f64>,
    logits: Vec<f64>,
}

fn decoder_forward(p: &ModelParams, y_prev: usize, s_prev: &[f64], context: &[f64]) -> DecoderStep {
    let emb = p.dec_embed.row(y_prev);
    let x: Vec<f64> = emb.iter().chain(context).copied().collect();
    let gru = gru_forward(&p.dec, &x, s_prev);

    let mut pre = p.ro_b.data().to_vec();
    p.ro_s.matvec_acc(&gru.h, &mut pre);
    p.ro_y.matvec_acc(emb, &mut pre);
    p.ro_c.matvec_acc(context, &mut pre);
    let width = p.dims().readout;
    let mut piece = vec![0; width];
    let mut readout = pre[..width].to_vec();
    for k in 1..p.dims().maxout_pieces {
        for i in 0..width {
            let v = pre[k * width + i];
            if v > readout[i] {
                readout[i] = v;
                piece[i] = k;
            }
        }
    }

    let mut logits = p.out_b.data().to_vec();
    p.out_w.matvec_acc(&readout, &mut logits);
    DecoderStep {
        gru,
        piece,
        readout,
        logits,
    }
}

/// Decoder state update and output logits for given previous symbol, state
/// and context vector.
pub fn decoder_step(
    p: &ModelParams,
    y_prev: usize,
    s_prev: &[f64],
    context: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), NeuralError> {
    check_y(p, y_prev)?;
    check_len(s_prev, p.dims().hidden)?;
    check_len(context, p.dims().annotation())?;
    let step = decoder_forward(p, y_prev, s_prev, context);
    Ok((step.gru.h, step.logits))
}

/// Softmax probabilities and `-ln p(gold)`.
pub fn softmax_xent(logits: &[f64], gold: usize) -> Result<(Vec<f64>, f64), NeuralError> {
    if gold >= logits.len() {
        return Err(NeuralError::GoldOutOfRange {
            id: gold,
            classes: logits.len(),
        });
    }
    let mut probs = logits.to_vec();
    softmax_in_place(&mut probs);
    let loss = -log_softmax_at(logits, gold);
    Ok((probs, loss))
}

fn log_softmax_at(logits: &[f64], i: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|l| crate::math::exp(l - max)).sum();
    logits[i] - max - ln(sum)
}

#[derive(Debug, Clone)]
struct TraceStep {
    attention: AttentionCache,
    decoder: DecoderStep,
    probs: Vec<f64>,
}

/// Record of a teacher-forced forward pass.
#[derive(Debug, Clone)]
pub struct SequenceTrace {
    encoded: Encoded,
    target: Vec<usize>,
    /// `s_0 .. s_T`.
    states: Vec<Vec<f64>>,
    steps: Vec<TraceStep>,
    pub loss: f64,
}

impl SequenceTrace {
    /// Attention weights used at every decoder step.
    pub fn attention_weights(&self) -> impl Iterator<Item = &[f64]> {
        self.steps.iter().map(|s| s.attention.weights.as_slice())
    }

    pub fn probabilities(&self) -> impl Iterator<Item = &[f64]> {
        self.steps.iter().map(|s| s.probs.as_slice())
    }
}

/// Teacher-forced pass over `target` (which starts with the start symbol and
/// ends with the end symbol). The loss is the summed cross-entropy of every
/// target symbol after the first.
pub fn forward(p: &ModelParams, input: &[usize], target: &[usize]) -> Result<SequenceTrace, NeuralError> {
    if target.len() < 2 {
        return Err(NeuralError::EmptySequence);
    }
    for &y in target {
        check_y(p, y)?;
    }
    let encoded = Encoded::new(p, input)?;
    let mut states = Vec::with_capacity(target.len());
    states.push(encoded.initial_state.clone());
    let mut steps = Vec::with_capacity(target.len() - 1);
    let mut loss = 0.0;
    for w in target.windows(2) {
        let s_prev = states.last().expect("initial state");
        let attention = attention_forward(p, s_prev, &encoded.annotations, &encoded.projected);
        let decoder = decoder_forward(p, w[0], s_prev, &attention.context);
        let (probs, l) = softmax_xent(&decoder.logits, w[1])?;
        loss += l;
        states.push(decoder.gru.h.clone());
        steps.push(TraceStep {
            attention,
            decoder,
            probs,
        });
    }
    Ok(SequenceTrace {
        encoded,
        target: target.to_vec(),
        states,
        steps,
        loss,
    })
}

/// Adds the gradient of `trace.loss` with respect to every parameter to `g`.
pub fn backward(p: &ModelParams, trace: &SequenceTrace, g: &mut ModelParams) {
    let dims = p.dims();
    let (h, e, width) = (dims.hidden, dims.embedding, dims.readout);
    let enc = &trace.encoded;
    let n = enc.len();
    let mut d_annotations = vec![vec![0.0; 2 * h]; n];
    let mut d_projected = vec![vec![0.0; dims.attention]; n];
    let mut d_state = vec![0.0; h];

    for (t, step) in trace.steps.iter().enumerate().rev() {
        let y_prev = trace.target[t];
        let gold = trace.target[t + 1];
        let s_prev = &trace.states[t];
        let s_t = &step.decoder.gru.h;
        let context = &step.attention.context;
        let emb = p.dec_embed.row(y_prev);

        let mut d_logits = step.probs.clone();
        d_logits[gold] -= 1.0;
        g.out_w.outer_acc(&d_logits, &step.decoder.readout);
        g.out_b.add_acc(&d_logits);
        let mut d_readout = vec![0.0; width];
        p.out_w.matvec_t_acc(&d_logits, &mut d_readout);

        let mut d_pre = vec![0.0; width * dims.maxout_pieces];
        for (i, &k) in step.decoder.piece.iter().enumerate() {
            d_pre[k * width + i] = d_readout[i];
        }
        g.ro_s.outer_acc(&d_pre, s_t);
        g.ro_y.outer_acc(&d_pre, emb);
        g.ro_c.outer_acc(&d_pre, context);
        g.ro_b.add_acc(&d_pre);
        p.ro_s.matvec_t_acc(&d_pre, &mut d_state);
        let mut d_emb = vec![0.0; e];
        p.ro_y.matvec_t_acc(&d_pre, &mut d_emb);
        let mut d_context = vec![0.0; 2 * h];
        p.ro_c.matvec_t_acc(&d_pre, &mut d_context);

        let (d_x, mut d_prev) = gru_backward(&p.dec, &mut g.dec, &step.decoder.gru, &d_state);
        for (a, b) in d_emb.iter_mut().zip(&d_x[..e]) {
            *a += b;
        }
        for (a, b) in d_context.iter_mut().zip(&d_x[e..]) {
            *a += b;
        }
        let d_s_att = attention_backward(
            p,
            g,
            &step.attention,
            s_prev,
            &enc.annotations,
            &d_context,
            &mut d_annotations,
            &mut d_projected,
        );
        for (a, b) in d_prev.iter_mut().zip(&d_s_att) {
            *a += b;
        }
        g.dec_embed.row_mut(y_prev).iter_mut().zip(&d_emb).for_each(|(a, b)| *a += b);
        d_state = d_prev;
    }

    // s_0 = tanh(init_w ←h_1 + init_b)
    let s0 = &trace.states[0];
    let d_pre: Vec<f64> = d_state.iter().zip(s0).map(|(d, s)| d * (1.0 - s * s)).collect();
    let first_back = &enc.backward[0].h;
    g.init_w.outer_acc(&d_pre, first_back);
    g.init_b.add_acc(&d_pre);
    p.init_w.matvec_t_acc(&d_pre, &mut d_annotations[0][h..]);

    for (j, dp) in d_projected.iter().enumerate() {
        g.att_wh.outer_acc(dp, &enc.annotations[j]);
        p.att_wh.matvec_t_acc(dp, &mut d_annotations[j]);
    }

    let mut carry = vec![0.0; h];
    for j in (0..n).rev() {
        let d_h: Vec<f64> = d_annotations[j][..h].iter().zip(&carry).map(|(a, b)| a + b).collect();
        let (d_x, d_prev) = gru_backward(&p.enc_fwd, &mut g.enc_fwd, &enc.forward[j], &d_h);
        g.enc_embed.row_mut(enc.input[j]).iter_mut().zip(&d_x).for_each(|(a, b)| *a += b);
        carry = d_prev;
    }
    carry.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..n {
        let d_h: Vec<f64> = d_annotations[j][h..].iter().zip(&carry).map(|(a, b)| a + b).collect();
        let (d_x, d_prev) = gru_backward(&p.enc_bwd, &mut g.enc_bwd, &enc.backward[j], &d_h);
        g.enc_embed.row_mut(enc.input[j]).iter_mut().zip(&d_x).for_each(|(a, b)| *a += b);
        carry = d_prev;
    }
}
