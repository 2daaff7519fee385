use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};

use crate::error::TrainError;
use crate::network::{Activation, Architecture, Layer, Matrix, Network};
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq)]
pub enum InitScheme {
    /// Weights and biases from `U[0, 1]`.
    Uniform01,
    /// Weights and biases from `N(0, 1)`.
    Normal,
    /// `U[-b, b]` with `b = sqrt(6 / (fan_in + fan_out))`, zero biases.
    XavierU,
    /// `N(0, 2 / (fan_in + fan_out))`, zero biases.
    XavierN,
    /// `U[-b, b]` with `b = sqrt(6 / fan_in)`, zero biases.
    HeU,
    /// `N(0, 2 / fan_in)`, zero biases.
    HeN,
    /// Weights and biases from `N(0, 0.01^2)`.
    SmallNorm,
    Manual(Network),
}

impl InitScheme {
    pub fn parse(tag: &str) -> Option<Self> {
        Some(match tag {
            "uniform01" => InitScheme::Uniform01,
            "normal" => InitScheme::Normal,
            "xavier_u" => InitScheme::XavierU,
            "xavier_n" => InitScheme::XavierN,
            "he_u" => InitScheme::HeU,
            "he_n" => InitScheme::HeN,
            "small_norm" => InitScheme::SmallNorm,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitScheme::Uniform01 => "uniform01",
            InitScheme::Normal => "normal",
            InitScheme::XavierU => "xavier_u",
            InitScheme::XavierN => "xavier_n",
            InitScheme::HeU => "he_u",
            InitScheme::HeN => "he_n",
            InitScheme::SmallNorm => "small_norm",
            InitScheme::Manual(_) => "manual",
        }
    }
}

pub fn init(arch: &Architecture, scheme: &InitScheme, seed: u64) -> Result<Network, TrainError> {
    if let InitScheme::Manual(net) = scheme {
        let have = net.architecture();
        if have != *arch {
            return Err(TrainError::Config(format!(
                "manual network has architecture {have} ({:?}), expected {arch} ({:?})",
                have.activations, arch.activations
            )));
        }
        return Ok(net.clone());
    }
    let mut rng = stream(seed, 0);
    let mut layers = Vec::with_capacity(arch.activations.len());
    for (i, act) in arch.activations.iter().enumerate() {
        if *act == Activation::MaxPool {
            layers.push(Layer::max_pool());
            continue;
        }
        let (fan_in, fan_out) = (arch.widths[i], arch.widths[i + 1]);
        let fi = fan_in as f64;
        let fo = fan_out as f64;
        let mut w = Matrix::zeros(fan_out, fan_in);
        let mut b = vec![0.0; fan_out];
        let unit = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
        let symmetric = |bound: f64| Uniform::new_inclusive(-bound, bound).expect("valid range");
        let normal = |std: f64| Normal::new(0.0, std).expect("valid std");
        match scheme {
            InitScheme::Uniform01 => {
                fill(w.as_mut_slice(), &unit, &mut rng);
                fill(&mut b, &unit, &mut rng);
            }
            InitScheme::Normal => {
                fill(w.as_mut_slice(), &StandardNormal, &mut rng);
                fill(&mut b, &StandardNormal, &mut rng);
            }
            InitScheme::XavierU => fill(
                w.as_mut_slice(),
                &symmetric((6.0 / (fi + fo)).sqrt()),
                &mut rng,
            ),
            InitScheme::XavierN => fill(
                w.as_mut_slice(),
                &normal((2.0 / (fi + fo)).sqrt()),
                &mut rng,
            ),
            InitScheme::HeU => fill(w.as_mut_slice(), &symmetric((6.0 / fi).sqrt()), &mut rng),
            InitScheme::HeN => fill(w.as_mut_slice(), &normal((2.0 / fi).sqrt()), &mut rng),
            InitScheme::SmallNorm => {
                fill(w.as_mut_slice(), &normal(0.01), &mut rng);
                fill(&mut b, &normal(0.01), &mut rng);
            }
            InitScheme::Manual(_) => unreachable!(),
        }
        layers.push(Layer::new(w, b, *act));
    }
    Ok(Network::new(arch.widths[0], layers)?)
}

fn fill<D: Distribution<f64>, R: Rng>(out: &mut [f64], dist: &D, rng: &mut R) {
    for v in out {
        *v = dist.sample(rng);
    }
}

/// Adds independent `N(0, std^2)` noise to every weight and bias.
pub fn perturb(net: &Network, std: f64, seed: u64) -> Network {
    let mut rng = stream(seed, 1);
    let noise = Normal::new(0.0, std).expect("valid std");
    let mut out = net.clone();
    for layer in out.layers_mut() {
        for v in layer
            .weights
            .as_mut_slice()
            .iter_mut()
            .chain(layer.bias.iter_mut())
        {
            *v += noise.sample(&mut rng);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch() -> Architecture {
        Architecture::new(
            vec![2, 6, 2, 1],
            vec![Activation::Relu, Activation::Relu, Activation::MaxPool],
        )
        .unwrap()
    }

    #[test]
    fn xavier_uniform_bound() {
        let net = init(&arch(), &InitScheme::XavierU, 3).unwrap();
        let bound = (6.0f64 / 8.0).sqrt();
        let w = net.layers()[0].weights.as_slice();
        assert!(w.iter().all(|v| v.abs() <= bound));
        assert!(w.iter().any(|v| v.abs() > 0.5 * bound));
        assert!(net.layers()[0].bias.iter().all(|b| *b == 0.0));
    }

    #[test]
    fn small_norm_standard_deviation() {
        let a = Architecture::relu(vec![100, 100]).unwrap();
        let net = init(&a, &InitScheme::SmallNorm, 9).unwrap();
        let w = net.layers()[0].weights.as_slice();
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((sd - 0.01).abs() < 0.002, "{sd}");
    }

    #[test]
    fn he_normal_scale() {
        let a = Architecture::relu(vec![50, 200]).unwrap();
        let net = init(&a, &InitScheme::HeN, 1).unwrap();
        let w = net.layers()[0].weights.as_slice();
        let var = w.iter().map(|v| v * v).sum::<f64>() / w.len() as f64;
        assert!((var - 2.0 / 50.0).abs() < 0.2 * 2.0 / 50.0);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let net = init(&arch(), &InitScheme::Uniform01, 2).unwrap();
        for l in net.layers() {
            assert!(l
                .weights
                .as_slice()
                .iter()
                .chain(&l.bias)
                .all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        for s in [
            InitScheme::Uniform01,
            InitScheme::Normal,
            InitScheme::XavierU,
            InitScheme::XavierN,
            InitScheme::HeU,
            InitScheme::HeN,
            InitScheme::SmallNorm,
        ] {
            assert_eq!(init(&arch(), &s, 5).unwrap(), init(&arch(), &s, 5).unwrap());
            assert_ne!(init(&arch(), &s, 5).unwrap(), init(&arch(), &s, 6).unwrap());
            assert_eq!(InitScheme::parse(s.name()), Some(s));
        }
    }

    #[test]
    fn manual_copies_and_checks_shape() {
        let net = init(&arch(), &InitScheme::Normal, 0).unwrap();
        let copy = init(&arch(), &InitScheme::Manual(net.clone()), 99).unwrap();
        assert_eq!(copy, net);
        let other = Architecture::relu(vec![2, 5, 1]).unwrap();
        assert!(init(&other, &InitScheme::Manual(net), 0).is_err());
    }

    #[test]
    fn perturb_moves_every_parameter() {
        let net = init(&arch(), &InitScheme::XavierU, 0).unwrap();
        let p = perturb(&net, 0.01, 4);
        for (a, b) in net.layers().iter().zip(p.layers()) {
            for (x, y) in a.weights.as_slice().iter().zip(b.weights.as_slice()) {
                assert!(x != y && (x - y).abs() < 0.06);
            }
        }
    }
}
