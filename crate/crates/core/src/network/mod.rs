//! Dense feed-forward networks with ReLU, sigmoid, identity and global
//! max-pool activations.

mod io;

pub use io::{LayerFile, NetworkFile, FORMAT_VERSION};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::NetworkError;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self, String> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(format!("row {i} has {} entries, expected {cols}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    /// Global maximum over the layer input; the layer carries no parameters.
    #[serde(rename = "maxpool")]
    MaxPool,
    Identity,
}

impl Activation {
    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::MaxPool => "maxpool",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "relu" => Activation::Relu,
            "sigmoid" => Activation::Sigmoid,
            "maxpool" => Activation::MaxPool,
            "identity" => Activation::Identity,
            _ => return None,
        })
    }

    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Identity | Activation::MaxPool => z,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// An affine map followed by an activation, or a parameter-free max-pool.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Self {
        Self {
            weights,
            bias,
            activation,
        }
    }

    /// Global max over the previous layer's outputs.
    pub fn max_pool() -> Self {
        Self {
            weights: Matrix::zeros(0, 0),
            bias: Vec::new(),
            activation: Activation::MaxPool,
        }
    }

    pub fn is_max_pool(&self) -> bool {
        self.activation == Activation::MaxPool
    }

    pub fn output_dim(&self) -> usize {
        if self.is_max_pool() {
            1
        } else {
            self.weights.rows()
        }
    }

    pub fn num_params(&self) -> usize {
        self.weights.as_slice().len() + self.bias.len()
    }
}

/// Layer widths `(input_dim, out_1, ..., out_L)` and per-layer activations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub widths: Vec<usize>,
    pub activations: Vec<Activation>,
}

impl Architecture {
    pub fn new(widths: Vec<usize>, activations: Vec<Activation>) -> Result<Self, NetworkError> {
        if widths.len() != activations.len() + 1 {
            return Err(NetworkError::Shape {
                layer: 0,
                message: format!(
                    "{} widths need {} activations, got {}",
                    widths.len(),
                    widths.len().saturating_sub(1),
                    activations.len()
                ),
            });
        }
        if let Some(i) = widths.iter().position(|w| *w == 0) {
            return Err(NetworkError::Shape {
                layer: i,
                message: "width must be at least 1".into(),
            });
        }
        for (i, a) in activations.iter().enumerate() {
            if *a == Activation::MaxPool && (i + 1 != activations.len() || widths[i + 1] != 1) {
                return Err(NetworkError::Shape {
                    layer: i,
                    message: "maxpool must be the final layer with width 1".into(),
                });
            }
        }
        Ok(Self {
            widths,
            activations,
        })
    }

    /// All-ReLU architecture.
    pub fn relu(widths: Vec<usize>) -> Result<Self, NetworkError> {
        let n = widths.len().saturating_sub(1);
        Self::new(widths, vec![Activation::Relu; n])
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.widths.iter().map(|w| w.to_string()).collect();
        f.write_str(&parts.join("→"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self, NetworkError> {
        if input_dim == 0 {
            return Err(NetworkError::Shape {
                layer: 0,
                message: "input dimension must be positive".into(),
            });
        }
        let mut width = input_dim;
        let last = layers.len().saturating_sub(1);
        for (i, layer) in layers.iter().enumerate() {
            if layer.is_max_pool() {
                if i != last {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: "maxpool may only be the final layer".into(),
                    });
                }
                if layer.weights.rows() != 0 || !layer.bias.is_empty() {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: "maxpool layer carries no weights or bias".into(),
                    });
                }
            } else {
                if layer.weights.cols() != width {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: format!(
                            "weights have {} columns but the layer input has width {width}",
                            layer.weights.cols()
                        ),
                    });
                }
                if layer.bias.len() != layer.weights.rows() {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: format!(
                            "bias has {} entries but weights have {} rows",
                            layer.bias.len(),
                            layer.weights.rows()
                        ),
                    });
                }
                if layer.weights.rows() == 0 {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: "layer has no outputs".into(),
                    });
                }
                if !layer
                    .weights
                    .as_slice()
                    .iter()
                    .chain(&layer.bias)
                    .all(|v| v.is_finite())
                {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: "non-finite parameter".into(),
                    });
                }
            }
            width = layer.output_dim();
        }
        Ok(Self { input_dim, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, Layer::output_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Mutable access for in-place parameter updates; shapes must not change.
    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::num_params).sum()
    }

    pub fn architecture(&self) -> Architecture {
        let mut widths = vec![self.input_dim];
        widths.extend(self.layers.iter().map(Layer::output_dim));
        Architecture {
            widths,
            activations: self.layers.iter().map(|l| l.activation).collect(),
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NetworkError> {
        if x.len() != self.input_dim {
            return Err(NetworkError::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            apply_layer(layer, &cur, &mut next);
            if next.iter().any(|v| !v.is_finite()) {
                return Err(NetworkError::NonFinite { layer: i });
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Scalar output of a single-output network.
    pub fn eval_scalar(&self, x: &[f64]) -> Result<f64, NetworkError> {
        let out = self.forward(x)?;
        if out.len() != 1 {
            return Err(NetworkError::Shape {
                layer: self.layers.len().saturating_sub(1),
                message: format!("expected a scalar output, got {} values", out.len()),
            });
        }
        Ok(out[0])
    }
}

pub(crate) fn apply_layer(layer: &Layer, input: &[f64], out: &mut Vec<f64>) {
    out.clear();
    if layer.is_max_pool() {
        out.push(input.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        return;
    }
    let w = &layer.weights;
    for r in 0..w.rows() {
        let z: f64 = w.row(r).iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + layer.bias[r];
        out.push(layer.activation.apply(z));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        let cols = rows[0].len();
        Matrix::from_rows(&rows, cols).unwrap()
    }

    #[test]
    fn identity_layer_passes_input() {
        let net = Network::new(
            2,
            vec![Layer::new(
                Matrix::identity(2),
                vec![0.0, 0.0],
                Activation::Identity,
            )],
        )
        .unwrap();
        assert_eq!(net.forward(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn relu_clips_negative_preactivation() {
        let net = Network::new(
            1,
            vec![Layer::new(m(&[&[1.0]]), vec![-1.0], Activation::Relu)],
        )
        .unwrap();
        assert_eq!(net.forward(&[0.5]).unwrap(), vec![0.0]);
    }

    #[test]
    fn maxpool_takes_global_max() {
        let net = Network::new(
            2,
            vec![
                Layer::new(Matrix::identity(2), vec![0.0, 0.0], Activation::Relu),
                Layer::max_pool(),
            ],
        )
        .unwrap();
        assert_eq!(net.forward(&[3.0, -2.0]).unwrap(), vec![3.0]);
        assert_eq!(net.architecture().widths, vec![2, 2, 1]);
    }

    #[test]
    fn empty_network_architecture() {
        let net = Network::new(3, vec![]).unwrap();
        assert_eq!(net.architecture().widths, vec![3]);
        assert!(net.architecture().activations.is_empty());
    }

    #[test]
    fn shape_errors_name_the_layer() {
        let err = Network::new(
            2,
            vec![
                Layer::new(Matrix::identity(2), vec![0.0, 0.0], Activation::Relu),
                Layer::new(Matrix::zeros(1, 3), vec![0.0], Activation::Relu),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::Shape { layer: 1, .. }));
        let err = Network::new(
            2,
            vec![
                Layer::max_pool(),
                Layer::new(Matrix::zeros(1, 1), vec![0.0], Activation::Relu),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::Shape { layer: 0, .. }));
    }

    #[test]
    fn forward_rejects_wrong_input() {
        let net = Network::new(2, vec![]).unwrap();
        assert!(matches!(
            net.forward(&[1.0]),
            Err(NetworkError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn overflow_is_reported_with_layer_index() {
        let net = Network::new(
            1,
            vec![
                Layer::new(m(&[&[1e200]]), vec![0.0], Activation::Identity),
                Layer::new(m(&[&[1e200]]), vec![0.0], Activation::Identity),
            ],
        )
        .unwrap();
        assert_eq!(
            net.forward(&[1e10]),
            Err(NetworkError::NonFinite { layer: 1 })
        );
    }

    #[test]
    fn sigmoid_is_stable_in_both_tails() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0) < 1e-300);
        assert_eq!(sigmoid(800.0), 1.0);
    }

    #[test]
    fn architecture_validation() {
        assert!(Architecture::new(
            vec![2, 6, 2, 1],
            vec![Activation::Relu, Activation::Relu, Activation::MaxPool]
        )
        .is_ok());
        assert!(
            Architecture::new(vec![2, 6, 2], vec![Activation::MaxPool, Activation::Relu]).is_err()
        );
        assert!(Architecture::relu(vec![2, 0, 1]).is_err());
        assert_eq!(
            Architecture::relu(vec![2, 11, 2, 2, 1])
                .unwrap()
                .to_string(),
            "2→11→2→2→1"
        );
    }
}
