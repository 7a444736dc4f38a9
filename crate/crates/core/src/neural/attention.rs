use alloc::vec;
use alloc::vec::Vec;

use super::tensor::{axpy, dot};
use super::{check_len, ModelParams, NeuralError, Tensor};
use crate::math::{exp, tanh};

/// Attention weights and context vector for one decoder step.
#[derive(Debug, Clone)]
pub(crate) struct AttentionCache {
    /// `tanh(W_s s_prev + W_h h_j)` per annotation.
    pub hidden: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub context: Vec<f64>,
}

/// `W_h h_j` for every annotation; constant over the decoder steps of one input.
pub(crate) fn project_annotations(w_h: &Tensor, annotations: &[Vec<f64>]) -> Vec<Vec<f64>> {
    annotations
        .iter()
        .map(|h| {
            let mut p = vec![0.0; w_h.rows()];
            w_h.matvec_acc(h, &mut p);
            p
        })
        .collect()
}

pub(crate) fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = exp(*x - max);
        sum += *x;
    }
    v.iter_mut().for_each(|x| *x /= sum);
}

pub(crate) fn attention_forward(
    p: &ModelParams,
    s_prev: &[f64],
    annotations: &[Vec<f64>],
    projected: &[Vec<f64>],
) -> AttentionCache {
    let mut query = vec![0.0; p.att_ws.rows()];
    p.att_ws.matvec_acc(s_prev, &mut query);
    let v = p.att_v.data();
    let mut weights = Vec::with_capacity(annotations.len());
    let hidden: Vec<Vec<f64>> = projected
        .iter()
        .map(|proj| {
            let a: Vec<f64> = proj.iter().zip(&query).map(|(x, q)| tanh(x + q)).collect();
            weights.push(dot(v, &a));
            a
        })
        .collect();
    softmax_in_place(&mut weights);
    let mut context = vec![0.0; annotations[0].len()];
    for (w, h) in weights.iter().zip(annotations) {
        axpy(*w, h, &mut context);
    }
    AttentionCache {
        hidden,
        weights,
        context,
    }
}

/// Reverse pass of one attention step. Adds to `d_annotations`, to
/// `d_projected` (gradient w.r.t. `W_h h_j`, folded in once per sequence), and
/// returns the gradient w.r.t. `s_prev`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn attention_backward(
    p: &ModelParams,
    g: &mut ModelParams,
    cache: &AttentionCache,
    s_prev: &[f64],
    annotations: &[Vec<f64>],
    d_context: &[f64],
    d_annotations: &mut [Vec<f64>],
    d_projected: &mut [Vec<f64>],
) -> Vec<f64> {
    let d_weights: Vec<f64> = annotations.iter().map(|h| dot(d_context, h)).collect();
    let mean: f64 = cache.weights.iter().zip(&d_weights).map(|(a, d)| a * d).sum();
    let v = p.att_v.data();
    let mut d_query = vec![0.0; p.att_ws.rows()];
    for j in 0..annotations.len() {
        let alpha = cache.weights[j];
        axpy(alpha, d_context, &mut d_annotations[j]);
        let d_energy = alpha * (d_weights[j] - mean);
        let a = &cache.hidden[j];
        axpy(d_energy, a, g.att_v.data_mut());
        for k in 0..a.len() {
            let d_pre = d_energy * v[k] * (1.0 - a[k] * a[k]);
            d_query[k] += d_pre;
            d_projected[j][k] += d_pre;
        }
    }
    g.att_ws.outer_acc(&d_query, s_prev);
    let mut d_s = vec![0.0; s_prev.len()];
    p.att_ws.matvec_t_acc(&d_query, &mut d_s);
    d_s
}

/// Attention over `annotations` from decoder state `s_prev`: energies
/// `e_j = vᵀ tanh(W_s s_prev + W_h h_j)`, weights `softmax(e)` and the context
/// `Σ_j α_j h_j`.
pub fn attention(
    p: &ModelParams,
    s_prev: &[f64],
    annotations: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>), NeuralError> {
    if annotations.is_empty() {
        return Err(NeuralError::EmptySequence);
    }
    check_len(s_prev, p.dims().hidden)?;
    for h in annotations {
        check_len(h, 2 * p.dims().hidden)?;
    }
    let projected = project_annotations(&p.att_wh, annotations);
    let c = attention_forward(p, s_prev, annotations, &projected);
    Ok((c.weights, c.context))
}
