use alloc::vec::Vec;

use rand::Rng;

use super::{NeuralError, Tensor};
use crate::math;

/// Ones on the main diagonal up to `min(rows, cols)`, zeros elsewhere.
pub fn identity_init(rows: usize, cols: usize) -> Result<Tensor, NeuralError> {
    let mut t = Tensor::zeros(&[rows, cols])?;
    for i in 0..rows.min(cols) {
        t.data_mut()[i * cols + i] = 1.0;
    }
    Ok(t)
}

pub fn zero_init(shape: &[usize]) -> Result<Tensor, NeuralError> {
    Tensor::zeros(shape)
}

/// Uniform in `±sqrt(6 / (rows + cols))`.
pub fn glorot_uniform<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<Tensor, NeuralError> {
    let limit = math::sqrt(6.0 / (rows + cols) as f64);
    uniform_init(&[rows, cols], limit, rng)
}

/// Uniform in `[-scale, scale)`.
pub fn uniform_init<R: Rng + ?Sized>(
    shape: &[usize],
    scale: f64,
    rng: &mut R,
) -> Result<Tensor, NeuralError> {
    let n = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| (rng.gen::<f64>() * 2.0 - 1.0) * scale).collect();
    Tensor::from_vec(shape, data)
}
