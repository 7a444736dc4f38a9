use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::init::{glorot_uniform, identity_init, zero_init};
use super::{check_len, NeuralError, Tensor};
use crate::math::{sigmoid, tanh};

/// Weights of one gated recurrent unit.
///
/// ```text
/// z  = σ(W_z x + U_z h + b_z)
/// r  = σ(W_r x + U_r h + b_r)
/// h~ = tanh(W_h x + U_h (r ⊙ h) + b_h)
/// h' = (1 - z) ⊙ h + z ⊙ h~
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub w_z: Tensor,
    pub w_r: Tensor,
    pub w_h: Tensor,
    pub u_z: Tensor,
    pub u_r: Tensor,
    pub u_h: Tensor,
    pub b_z: Tensor,
    pub b_r: Tensor,
    pub b_h: Tensor,
}

pub(crate) const GRU_FIELDS: [&str; 9] = ["w_z", "w_r", "w_h", "u_z", "u_r", "u_h", "b_z", "b_r", "b_h"];

impl GruParams {
    pub fn zeros(input: usize, hidden: usize) -> Result<Self, NeuralError> {
        Ok(GruParams {
            w_z: zero_init(&[hidden, input])?,
            w_r: zero_init(&[hidden, input])?,
            w_h: zero_init(&[hidden, input])?,
            u_z: zero_init(&[hidden, hidden])?,
            u_r: zero_init(&[hidden, hidden])?,
            u_h: zero_init(&[hidden, hidden])?,
            b_z: zero_init(&[hidden])?,
            b_r: zero_init(&[hidden])?,
            b_h: zero_init(&[hidden])?,
        })
    }

    pub fn identity(input: usize, hidden: usize) -> Result<Self, NeuralError> {
        Ok(GruParams {
            w_z: identity_init(hidden, input)?,
            w_r: identity_init(hidden, input)?,
            w_h: identity_init(hidden, input)?,
            u_z: identity_init(hidden, hidden)?,
            u_r: identity_init(hidden, hidden)?,
            u_h: identity_init(hidden, hidden)?,
            ..Self::zeros(input, hidden)?
        })
    }

    pub fn glorot<R: Rng + ?Sized>(input: usize, hidden: usize, rng: &mut R) -> Result<Self, NeuralError> {
        Ok(GruParams {
            w_z: glorot_uniform(hidden, input, rng)?,
            w_r: glorot_uniform(hidden, input, rng)?,
            w_h: glorot_uniform(hidden, input, rng)?,
            u_z: glorot_uniform(hidden, hidden, rng)?,
            u_r: glorot_uniform(hidden, hidden, rng)?,
            u_h: glorot_uniform(hidden, hidden, rng)?,
            ..Self::zeros(input, hidden)?
        })
    }

    pub fn input_size(&self) -> usize {
        self.w_z.cols()
    }

    pub fn hidden_size(&self) -> usize {
        self.u_z.rows()
    }

    pub fn tensors(&self) -> [&Tensor; 9] {
        [
            &self.w_z, &self.w_r, &self.w_h, &self.u_z, &self.u_r, &self.u_h, &self.b_z,
            &self.b_r, &self.b_h,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor; 9] {
        [
            &mut self.w_z,
            &mut self.w_r,
            &mut self.w_h,
            &mut self.u_z,
            &mut self.u_r,
            &mut self.u_h,
            &mut self.b_z,
            &mut self.b_r,
            &mut self.b_h,
        ]
    }
}

/// Intermediates of one GRU step.
#[derive(Debug, Clone)]
pub(crate) struct GruCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub candidate: Vec<f64>,
    pub h: Vec<f64>,
}

pub(crate) fn gru_forward(p: &GruParams, x: &[f64], h_prev: &[f64]) -> GruCache {
    let n = p.hidden_size();
    let mut z = p.b_z.data().to_vec();
    p.w_z.matvec_acc(x, &mut z);
    p.u_z.matvec_acc(h_prev, &mut z);
    z.iter_mut().for_each(|v| *v = sigmoid(*v));

    let mut r = p.b_r.data().to_vec();
    p.w_r.matvec_acc(x, &mut r);
    p.u_r.matvec_acc(h_prev, &mut r);
    r.iter_mut().for_each(|v| *v = sigmoid(*v));

    let rh: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
    let mut candidate = p.b_h.data().to_vec();
    p.w_h.matvec_acc(x, &mut candidate);
    p.u_h.matvec_acc(&rh, &mut candidate);
    candidate.iter_mut().for_each(|v| *v = tanh(*v));

    let h = (0..n)
        .map(|i| (1.0 - z[i]) * h_prev[i] + z[i] * candidate[i])
        .collect();
    GruCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        z,
        r,
        candidate,
        h,
    }
}

/// Accumulates parameter gradients for one step given `dh` (gradient w.r.t.
/// the new state) and returns `(dx, dh_prev)`.
pub(crate) fn gru_backward(
    p: &GruParams,
    g: &mut GruParams,
    c: &GruCache,
    dh: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = p.hidden_size();
    let mut dx = vec![0.0; p.input_size()];
    let mut dh_prev: Vec<f64> = (0..n).map(|i| dh[i] * (1.0 - c.z[i])).collect();

    let da_h: Vec<f64> = (0..n)
        .map(|i| dh[i] * c.z[i] * (1.0 - c.candidate[i] * c.candidate[i]))
        .collect();
    let da_z: Vec<f64> = (0..n)
        .map(|i| dh[i] * (c.candidate[i] - c.h_prev[i]) * c.z[i] * (1.0 - c.z[i]))
        .collect();

    let rh: Vec<f64> = c.r.iter().zip(&c.h_prev).map(|(a, b)| a * b).collect();
    g.w_h.outer_acc(&da_h, &c.x);
    g.u_h.outer_acc(&da_h, &rh);
    g.b_h.add_acc(&da_h);
    p.w_h.matvec_t_acc(&da_h, &mut dx);
    let mut drh = vec![0.0; n];
    p.u_h.matvec_t_acc(&da_h, &mut drh);

    let da_r: Vec<f64> = (0..n)
        .map(|i| drh[i] * c.h_prev[i] * c.r[i] * (1.0 - c.r[i]))
        .collect();
    for i in 0..n {
        dh_prev[i] += drh[i] * c.r[i];
    }

    g.w_z.outer_acc(&da_z, &c.x);
    g.u_z.outer_acc(&da_z, &c.h_prev);
    g.b_z.add_acc(&da_z);
    p.w_z.matvec_t_acc(&da_z, &mut dx);
    p.u_z.matvec_t_acc(&da_z, &mut dh_prev);

    g.w_r.outer_acc(&da_r, &c.x);
    g.u_r.outer_acc(&da_r, &c.h_prev);
    g.b_r.add_acc(&da_r);
    p.w_r.matvec_t_acc(&da_r, &mut dx);
    p.u_r.matvec_t_acc(&da_r, &mut dh_prev);

    (dx, dh_prev)
}

/// One GRU step: the new hidden state for input `x` and previous state `h_prev`.
pub fn gru_step(p: &GruParams, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>, NeuralError> {
    check_len(x, p.input_size())?;
    check_len(h_prev, p.hidden_size())?;
    Ok(gru_forward(p, x, h_prev).h)
}
