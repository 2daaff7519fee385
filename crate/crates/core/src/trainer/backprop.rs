use rand::Rng;
use serde::Serialize;

use super::{init, Dataset, Loss, TrainConfig};
use crate::error::TrainError;
use crate::network::{apply_layer, sigmoid, Activation, Architecture, Layer, Network};
use crate::rng::stream;

/// Per-layer gradients laid out like the parameters.
struct Grads {
    w: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl Grads {
    fn zeros(net: &Network) -> Self {
        Self {
            w: net
                .layers()
                .iter()
                .map(|l| vec![0.0; l.weights.as_slice().len()])
                .collect(),
            b: net
                .layers()
                .iter()
                .map(|l| vec![0.0; l.bias.len()])
                .collect(),
        }
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn check_compatible(net: &Network, data: &Dataset, loss: Loss) -> Result<(), TrainError> {
    if data.is_empty() {
        return Err(TrainError::Config("dataset is empty".into()));
    }
    if net.output_dim() != 1 {
        return Err(TrainError::Config(format!(
            "training needs a scalar output, network has {}",
            net.output_dim()
        )));
    }
    if let Some(p) = data.points.iter().find(|p| p.len() != net.input_dim()) {
        return Err(TrainError::Config(format!(
            "data point of dimension {} for a network with input {}",
            p.len(),
            net.input_dim()
        )));
    }
    if loss == Loss::Bce && net.layers().last().map(|l| l.activation) != Some(Activation::Sigmoid) {
        return Err(TrainError::Config(
            "binary cross-entropy needs a final sigmoid layer".into(),
        ));
    }
    Ok(())
}

/// Forward pass keeping every layer's input and pre-activation.
fn forward_trace(net: &Network, x: &[f64], acts: &mut Vec<Vec<f64>>, pre: &mut Vec<Vec<f64>>) {
    acts.resize(net.layers().len() + 1, Vec::new());
    pre.resize(net.layers().len(), Vec::new());
    acts[0].clear();
    acts[0].extend_from_slice(x);
    for (l, layer) in net.layers().iter().enumerate() {
        let z = &mut pre[l];
        z.clear();
        if layer.is_max_pool() {
            z.extend_from_slice(&acts[l]);
        } else {
            let w = &layer.weights;
            for r in 0..w.rows() {
                let s: f64 = w.row(r).iter().zip(&acts[l]).map(|(a, b)| a * b).sum();
                z.push(s + layer.bias[r]);
            }
        }
        let (head, tail) = acts.split_at_mut(l + 1);
        apply_layer(layer, &head[l], &mut tail[0]);
    }
}

/// Lowest index attaining the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Mean loss and, optionally, its gradient.
fn evaluate(net: &Network, data: &Dataset, loss: Loss, grads: Option<&mut Grads>) -> f64 {
    let n = data.len() as f64;
    let layers = net.layers();
    let mut acts = Vec::new();
    let mut pre = Vec::new();
    let mut total = 0.0;
    let mut grads = grads;
    let mut delta: Vec<f64> = Vec::new();
    let mut next: Vec<f64> = Vec::new();
    for (x, &y) in data.points.iter().zip(&data.labels) {
        forward_trace(net, x, &mut acts, &mut pre);
        let out = acts[layers.len()][0];
        // Gradient with respect to the final pre-activation (BCE) or output (MSE).
        let (value, seed_grad) = match loss {
            Loss::Mse => ((out - y).powi(2), 2.0 * (out - y) / n),
            Loss::Bce => {
                let z = pre[layers.len() - 1][0];
                (softplus(z) - y * z, (sigmoid(z) - y) / n)
            }
        };
        total += value;
        let Some(g) = grads.as_deref_mut() else {
            continue;
        };
        delta.clear();
        delta.push(seed_grad);
        for l in (0..layers.len()).rev() {
            let layer: &Layer = &layers[l];
            let input = &acts[l];
            next.clear();
            next.resize(input.len(), 0.0);
            if layer.is_max_pool() {
                next[argmax(input)] = delta[0];
            } else {
                let skip_act = loss == Loss::Bce && l == layers.len() - 1;
                for r in 0..layer.weights.rows() {
                    let z = pre[l][r];
                    let dz = if skip_act {
                        delta[r]
                    } else {
                        delta[r]
                            * match layer.activation {
                                Activation::Relu => {
                                    if z > 0.0 {
                                        1.0
                                    } else {
                                        0.0
                                    }
                                }
                                Activation::Sigmoid => {
                                    let s = sigmoid(z);
                                    s * (1.0 - s)
                                }
                                Activation::Identity | Activation::MaxPool => 1.0,
                            }
                    };
                    if dz == 0.0 {
                        continue;
                    }
                    let cols = layer.weights.cols();
                    let gw = &mut g.w[l][r * cols..(r + 1) * cols];
                    for (gwi, xi) in gw.iter_mut().zip(input) {
                        *gwi += dz * xi;
                    }
                    g.b[l][r] += dz;
                    if l > 0 {
                        for (ni, wi) in next.iter_mut().zip(layer.weights.row(r)) {
                            *ni += dz * wi;
                        }
                    }
                }
            }
            std::mem::swap(&mut delta, &mut next);
        }
    }
    total / n
}

/// Mean lattice loss of `net` on `data`.
pub fn loss(net: &Network, data: &Dataset, kind: Loss) -> Result<f64, TrainError> {
    check_compatible(net, data, kind)?;
    Ok(evaluate(net, data, kind, None))
}

/// Full-batch gradient descent; returns the trained copy and the loss
/// before training followed by the loss after each epoch.
pub fn train(
    net: &Network,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(Network, Vec<f64>), TrainError> {
    check_compatible(net, data, cfg.loss)?;
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(TrainError::Config(format!(
            "learning rate must be positive, got {}",
            cfg.learning_rate
        )));
    }
    let mut net = net.clone();
    let mut grads = Grads::zeros(&net);
    let mut curve = Vec::with_capacity(cfg.epochs + 1);
    let l0 = evaluate(&net, data, cfg.loss, Some(&mut grads));
    if !l0.is_finite() {
        return Err(TrainError::Diverged { epoch: 0, curve });
    }
    curve.push(l0);
    for epoch in 1..=cfg.epochs {
        for (l, layer) in net.layers_mut().iter_mut().enumerate() {
            for (w, g) in layer.weights.as_mut_slice().iter_mut().zip(&grads.w[l]) {
                *w -= cfg.learning_rate * g;
            }
            for (b, g) in layer.bias.iter_mut().zip(&grads.b[l]) {
                *b -= cfg.learning_rate * g;
            }
        }
        grads
            .w
            .iter_mut()
            .chain(grads.b.iter_mut())
            .for_each(|g| g.fill(0.0));
        let l = evaluate(&net, data, cfg.loss, Some(&mut grads));
        if !l.is_finite() {
            return Err(TrainError::Diverged { epoch, curve });
        }
        curve.push(l);
        if let Some(tol) = cfg.early_stop {
            if curve.len() > 100 && curve[curve.len() - 101] - l < tol {
                break;
            }
        }
    }
    Ok((net, curve))
}

const FD_STEP: f64 = 1e-5;

/// Smallest distance of any ReLU pre-activation from its kink, or of the
/// pooled maximum from the runner-up.
fn kink_margin(net: &Network, x: &[f64]) -> f64 {
    let mut acts = Vec::new();
    let mut pre = Vec::new();
    forward_trace(net, x, &mut acts, &mut pre);
    let mut m = f64::INFINITY;
    for (l, layer) in net.layers().iter().enumerate() {
        match layer.activation {
            Activation::Relu => {
                for z in &pre[l] {
                    // Units whose pre-activation never depends on the input stay where they are.
                    if *z != 0.0 {
                        m = m.min(z.abs());
                    }
                }
            }
            Activation::MaxPool => {
                let v = &pre[l];
                let top = argmax(v);
                for (i, z) in v.iter().enumerate() {
                    if i != top && *z != v[top] {
                        m = m.min(v[top] - z);
                    }
                }
            }
            _ => {}
        }
    }
    m
}

/// Largest relative difference between reverse-mode and (Richardson-extrapolated) central-difference
/// gradients, on inputs nudged away from ReLU kinks.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-4)`.
pub fn gradient_check(
    net: &Network,
    data: &Dataset,
    kind: Loss,
    seed: u64,
) -> Result<f64, TrainError> {
    check_compatible(net, data, kind)?;
    if data.len() > 64 {
        return Err(TrainError::Config(format!(
            "gradient check is limited to 64 points, got {}",
            data.len()
        )));
    }
    let mut rng = stream(seed, 2);
    let mut points = Vec::with_capacity(data.len());
    for p in &data.points {
        let mut best = (f64::NEG_INFINITY, p.clone());
        for _ in 0..100 {
            let q: Vec<f64> = p
                .iter()
                .map(|c| c + rng.random_range(-1e-3..=1e-3))
                .collect();
            let m = kink_margin(net, &q);
            if m > best.0 {
                best = (m, q);
            }
        }
        points.push(best.1);
    }
    let shifted = Dataset {
        points,
        labels: data.labels.clone(),
    };
    let mut grads = Grads::zeros(net);
    evaluate(net, &shifted, kind, Some(&mut grads));

    let mut worst: f64 = 0.0;
    let mut probe = net.clone();
    // Richardson extrapolation of central differences at h and h/2.
    let numeric = |probe: &mut Network, set: &dyn Fn(&mut Network, f64), orig: f64| {
        let mut central = |h: f64| {
            set(probe, orig + h);
            let plus = evaluate(probe, &shifted, kind, None);
            set(probe, orig - h);
            let minus = evaluate(probe, &shifted, kind, None);
            (plus - minus) / (2.0 * h)
        };
        let (coarse, fine) = (central(FD_STEP), central(FD_STEP / 2.0));
        set(probe, orig);
        (4.0 * fine - coarse) / 3.0
    };
    let rel = |analytic: f64, numeric: f64| {
        let scale = analytic.abs().max(numeric.abs()).max(1e-4);
        (analytic - numeric).abs() / scale
    };
    for l in 0..net.layers().len() {
        for i in 0..net.layers()[l].weights.as_slice().len() {
            let orig = net.layers()[l].weights.as_slice()[i];
            let set = |n: &mut Network, v: f64| n.layers_mut()[l].weights.as_mut_slice()[i] = v;
            let n = numeric(&mut probe, &set, orig);
            worst = worst.max(rel(grads.w[l][i], n));
        }
        for i in 0..net.layers()[l].bias.len() {
            let orig = net.layers()[l].bias[i];
            let set = |n: &mut Network, v: f64| n.layers_mut()[l].bias[i] = v;
            let n = numeric(&mut probe, &set, orig);
            worst = worst.max(rel(grads.b[l][i], n));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorReport {
    pub hidden_width: usize,
    pub best_loss: f64,
    /// Final loss per trial; diverged runs record infinity.
    pub losses: Vec<f64>,
    pub note: &'static str,
}

/// Trains `d -> h -> 1` networks from `trials` seeds and reports the best final loss.
pub fn two_layer_floor_demo(
    data: &Dataset,
    hidden_width: usize,
    trials: usize,
    cfg: &TrainConfig,
) -> Result<FloorReport, TrainError> {
    if hidden_width == 0 || trials == 0 {
        return Err(TrainError::Config(
            "hidden width and trial count must be positive".into(),
        ));
    }
    let d = data
        .points
        .first()
        .map(Vec::len)
        .ok_or_else(|| TrainError::Config("dataset is empty".into()))?;
    let head = match cfg.loss {
        Loss::Mse => Activation::Identity,
        Loss::Bce => Activation::Sigmoid,
    };
    let arch = Architecture::new(vec![d, hidden_width, 1], vec![Activation::Relu, head])?;
    let mut losses = Vec::with_capacity(trials);
    for t in 0..trials {
        let net = init(&arch, &cfg.init, cfg.seed.wrapping_add(t as u64))?;
        match train(&net, data, cfg) {
            Ok((_, curve)) => losses.push(*curve.last().expect("nonempty curve")),
            Err(TrainError::Diverged { .. }) => losses.push(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(FloorReport {
        hidden_width,
        best_loss: losses.iter().copied().fold(f64::INFINITY, f64::min),
        losses,
        note: "a positive floor on a finite lattice is only suggestive; \
               the two-layer impossibility result is about L^p on all of R^d",
    })
}
