//! Versioned JSON network files.
//!
//! `{"version":"v1","input_dim":d,"layers":[{"w":[[...]],"b":[...],"act":"relu"}]}`
//!
//! Numbers are written in shortest round-trip decimal form, so a
//! serialize/deserialize cycle reproduces every weight bit for bit.

use serde::{Deserialize, Serialize};

use super::{Activation, Layer, Matrix, Network};
use crate::error::NetworkError;

pub const FORMAT_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerFile {
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub act: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub version: String,
    pub input_dim: usize,
    pub layers: Vec<LayerFile>,
}

impl From<&Network> for NetworkFile {
    fn from(net: &Network) -> Self {
        NetworkFile {
            version: FORMAT_VERSION.to_string(),
            input_dim: net.input_dim(),
            layers: net
                .layers()
                .iter()
                .map(|l| LayerFile {
                    w: l.weights.to_rows(),
                    b: l.bias.clone(),
                    act: l.activation.as_str().to_string(),
                })
                .collect(),
        }
    }
}

impl NetworkFile {
    pub fn into_network(self) -> Result<Network, NetworkError> {
        if self.version != FORMAT_VERSION {
            return Err(NetworkError::UnsupportedVersion(self.version));
        }
        let mut width = self.input_dim;
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, lf) in self.layers.into_iter().enumerate() {
            let act = Activation::parse(&lf.act).ok_or_else(|| NetworkError::Shape {
                layer: i,
                message: format!("unknown activation {:?}", lf.act),
            })?;
            let layer = if act == Activation::MaxPool {
                if !lf.w.is_empty() || !lf.b.is_empty() {
                    return Err(NetworkError::Shape {
                        layer: i,
                        message: "maxpool layer must have empty \"w\" and \"b\"".into(),
                    });
                }
                Layer::max_pool()
            } else {
                let weights = Matrix::from_rows(&lf.w, width)
                    .map_err(|message| NetworkError::Shape { layer: i, message })?;
                Layer::new(weights, lf.b, act)
            };
            width = layer.output_dim();
            layers.push(layer);
        }
        Network::new(self.input_dim, layers)
    }
}

impl Network {
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&NetworkFile::from(self)).expect("network serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| {
            NetworkError::Format(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        file.into_network()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Network {
        Network::new(
            2,
            vec![
                Layer::new(
                    Matrix::from_rows(&[vec![0.1, -1.0 / 3.0], vec![1e-300, 7.0]], 2).unwrap(),
                    vec![std::f64::consts::PI, -0.0],
                    Activation::Relu,
                ),
                Layer::max_pool(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let net = sample();
        let text = net.to_json();
        let back = Network::from_json(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.to_json(), text);
        for (a, b) in net.layers()[0]
            .weights
            .as_slice()
            .iter()
            .zip(back.layers()[0].weights.as_slice())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let text = sample().to_json().replace("\"v1\"", "\"v9\"");
        assert_eq!(
            Network::from_json(&text),
            Err(NetworkError::UnsupportedVersion("v9".into()))
        );
    }

    #[test]
    fn mismatched_shapes_name_the_layer() {
        let text = r#"{"version":"v1","input_dim":2,"layers":[
            {"w":[[1,0],[0,1]],"b":[0,0],"act":"relu"},
            {"w":[[1,1,1]],"b":[0],"act":"identity"}]}"#;
        match Network::from_json(text) {
            Err(NetworkError::Shape { layer: 1, message }) => assert!(message.contains("row 0")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_file_reports_position() {
        match Network::from_json("{\"version\": \"v1\",\n\"input_dim\": }") {
            Err(NetworkError::Format(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
