use crate::error::ConstructError;
use crate::network::{Activation, Layer, Matrix, Network};

/// Replaces a final `MAX` over gate outputs in `[0, 1]` by
/// `1 - relu(1 - sum a_i)`, i.e. one ReLU unit and an affine output.
///
/// Agrees with `MAX` when every gate output is 0 or 1; inside shells the two
/// may differ (e.g. `a = (0.6, 0.6)` gives 1 instead of 0.6).
pub fn maxpool_to_relu(net: &Network) -> Result<Network, ConstructError> {
    let layers = net.layers();
    if !layers.last().is_some_and(|l| l.is_max_pool()) {
        return Err(ConstructError::HeadNotRecognized(
            "network does not end in maxpool".into(),
        ));
    }
    let k = if layers.len() >= 2 {
        layers[layers.len() - 2].output_dim()
    } else {
        net.input_dim()
    };
    let mut out: Vec<Layer> = layers[..layers.len() - 1].to_vec();
    let mut sum = Matrix::zeros(1, k);
    sum.as_mut_slice().fill(-1.0);
    out.push(Layer::new(sum, vec![1.0], Activation::Relu));
    out.push(Layer::new(
        Matrix::from_rows(&[vec![-1.0]], 1).expect("1x1"),
        vec![1.0],
        Activation::Identity,
    ));
    Ok(Network::new(net.input_dim(), out)?)
}

/// Slope for which `SIG(M/2) > 1 - delta`, with a 1% margin.
pub fn sigmoid_slope(delta: f64) -> f64 {
    2.0 * ((1.0 - delta) / delta).ln() * 1.01
}

/// Replaces the final head by a sigmoid so the output is above `1 - delta`
/// on the set and below `delta` outside its neighbourhood.
///
/// A final `MAX` over `k` gates becomes `SIG(M (sum a_i - 1/2))`; a final
/// `relu(b - a)` unit becomes `SIG(M (b - a - 1/2))`.
pub fn sigmoid_head(net: &Network, delta: f64) -> Result<Network, ConstructError> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(ConstructError::InvalidPlan(format!(
            "delta must lie in (0, 1/2), got {delta}"
        )));
    }
    let m = sigmoid_slope(delta);
    let layers = net.layers();
    let Some(last) = layers.last() else {
        return Err(ConstructError::HeadNotRecognized(
            "network has no layers".into(),
        ));
    };
    let mut out: Vec<Layer> = layers[..layers.len() - 1].to_vec();
    if last.is_max_pool() {
        let k = if layers.len() >= 2 {
            layers[layers.len() - 2].output_dim()
        } else {
            net.input_dim()
        };
        let mut w = Matrix::zeros(1, k);
        w.as_mut_slice().fill(m);
        out.push(Layer::new(w, vec![-m / 2.0], Activation::Sigmoid));
    } else if last.activation == Activation::Relu
        && last.weights.rows() == 1
        && last.weights.cols() == 2
        && last.weights.as_slice() == [-1.0, 1.0]
        && last.bias == [0.0]
    {
        let w = Matrix::from_rows(&[vec![-m, m]], 2).expect("1x2");
        out.push(Layer::new(w, vec![-m / 2.0], Activation::Sigmoid));
    } else {
        return Err(ConstructError::HeadNotRecognized(format!(
            "final layer is {} with {} outputs; expected maxpool or relu(b - a)",
            last.activation,
            last.output_dim()
        )));
    }
    Ok(Network::new(net.input_dim(), out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::sigmoid;

    /// Identity hidden layer feeding the head, so the head sees `a` directly.
    fn head_over(a_dim: usize) -> Network {
        Network::new(
            a_dim,
            vec![
                Layer::new(Matrix::identity(a_dim), vec![0.0; a_dim], Activation::Relu),
                Layer::max_pool(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rewrite_matches_max_on_binary_values() {
        let net = maxpool_to_relu(&head_over(2)).unwrap();
        assert_eq!(net.architecture().widths, vec![2, 2, 1, 1]);
        assert_eq!(net.eval_scalar(&[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(net.eval_scalar(&[0.0, 0.0]).unwrap(), 0.0);
        // Documented disagreement inside shells.
        assert_eq!(net.eval_scalar(&[0.6, 0.6]).unwrap(), 1.0);
        assert_eq!(head_over(2).eval_scalar(&[0.6, 0.6]).unwrap(), 0.6);
    }

    #[test]
    fn rewrite_requires_maxpool() {
        let net = Network::new(1, vec![]).unwrap();
        assert!(matches!(
            maxpool_to_relu(&net),
            Err(ConstructError::HeadNotRecognized(_))
        ));
    }

    #[test]
    fn slope_for_one_percent() {
        let m = sigmoid_slope(0.01);
        assert!((m - 2.0 * 99f64.ln() * 1.01).abs() < 1e-12);
        assert!((m - 9.28).abs() < 0.01);
        assert!(sigmoid(m / 2.0) > 0.99);
        assert!(sigmoid(-m / 2.0) < 0.01);
    }

    #[test]
    fn maxpool_sigmoid_head() {
        let net = sigmoid_head(&head_over(3), 0.01).unwrap();
        assert!(net.eval_scalar(&[1.0, 0.0, 0.0]).unwrap() > 0.99);
        assert!(net.eval_scalar(&[0.0, 0.0, 0.0]).unwrap() < 0.01);
    }

    #[test]
    fn difference_sigmoid_head() {
        let net = Network::new(
            2,
            vec![
                Layer::new(Matrix::identity(2), vec![0.0, 0.0], Activation::Relu),
                Layer::new(
                    Matrix::from_rows(&[vec![-1.0, 1.0]], 2).unwrap(),
                    vec![0.0],
                    Activation::Relu,
                ),
            ],
        )
        .unwrap();
        let s = sigmoid_head(&net, 0.05).unwrap();
        assert!(s.eval_scalar(&[0.0, 1.0]).unwrap() > 0.95);
        assert!(s.eval_scalar(&[1.0, 1.0]).unwrap() < 0.05);
        assert!(s.eval_scalar(&[1.0, 0.0]).unwrap() < 0.05);
    }

    #[test]
    fn near_half_delta_flattens_output() {
        let net = sigmoid_head(&head_over(2), 0.5 - 1e-9).unwrap();
        for x in [[0.0, 0.0], [1.0, 1.0]] {
            assert!((net.eval_scalar(&x).unwrap() - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn unrecognized_head() {
        let net = Network::new(
            1,
            vec![Layer::new(
                Matrix::identity(1),
                vec![0.0],
                Activation::Identity,
            )],
        )
        .unwrap();
        assert!(matches!(
            sigmoid_head(&net, 0.1),
            Err(ConstructError::HeadNotRecognized(_))
        ));
    }
}
