//! Lattice datasets, initializers and full-batch gradient descent.

mod backprop;
mod init;
mod lines;

pub use backprop::{gradient_check, loss, train, two_layer_floor_demo, FloorReport};
pub use init::{init, perturb, InitScheme};
pub use lines::{clip_line, line_hausdorff, zero_lines, zero_lines_csv, ZeroLine};

use serde::{Deserialize, Serialize};

use crate::error::TrainError;
use crate::geometry::{AxisBox, Space};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, TrainError> {
        if points.len() != labels.len() {
            return Err(TrainError::Config(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|l| **l != 0.0 && **l != 1.0) {
            return Err(TrainError::Config(format!("label {l} is not 0 or 1")));
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|l| **l == 1.0).count()
    }
}

/// `resolution^d` grid points on the closed box, last axis fastest; label 1
/// for members of `space`.
pub fn lattice_dataset(
    space: &Space,
    bx: &AxisBox,
    resolution: usize,
) -> Result<Dataset, TrainError> {
    if resolution < 2 {
        return Err(TrainError::Config(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let d = bx.dim();
    if space.dim() != d {
        return Err(TrainError::Config("box and space dimensions differ".into()));
    }
    let total = resolution
        .checked_pow(d as u32)
        .ok_or_else(|| TrainError::Config("lattice too large".into()))?;
    let step: Vec<f64> = bx
        .min()
        .iter()
        .zip(bx.max())
        .map(|(a, b)| (b - a) / (resolution - 1) as f64)
        .collect();
    let mut points = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut x = vec![0.0; d];
        for k in (0..d).rev() {
            x[k] = bx.min()[k] + (rest % resolution) as f64 * step[k];
            rest /= resolution;
        }
        let inside = space
            .contains(&x)
            .map_err(|e| TrainError::Config(e.to_string()))?;
        labels.push(if inside { 1.0 } else { 0.0 });
        points.push(x);
    }
    Ok(Dataset { points, labels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    Mse,
    Bce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub loss: Loss,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init: InitScheme,
    pub seed: u64,
    /// Stop once the loss fell by less than this over the last 100 epochs.
    pub early_stop: Option<f64>,
}

impl TrainConfig {
    pub fn new(loss: Loss, learning_rate: f64, epochs: usize, init: InitScheme, seed: u64) -> Self {
        Self {
            loss,
            learning_rate,
            epochs,
            init,
            seed,
            early_stop: None,
        }
    }
}

/// `epoch,loss` rows.
pub fn loss_curve_csv(curve: &[f64]) -> String {
    let mut s = String::from("epoch,loss\n");
    for (i, l) in curve.iter().enumerate() {
        s.push_str(&format!("{i},{l}\n"));
    }
    s
}

/// `x,y,value` rows of the network evaluated on planar points.
pub fn prediction_grid_csv(net: &Network, points: &[Vec<f64>]) -> Result<String, TrainError> {
    let mut s = String::from("x,y,value\n");
    for p in points {
        let v = net.eval_scalar(p)?;
        let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        s.push_str(&format!("{},{v}\n", coords.join(",")));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexPolytope, Simplex};

    fn tri(v: [[f64; 2]; 3]) -> ConvexPolytope {
        Simplex::new(v.iter().map(|p| p.to_vec()).collect())
            .unwrap()
            .facet_hyperplanes()
            .unwrap()
    }

    fn bx20() -> AxisBox {
        AxisBox::new(vec![-20.0, -20.0], vec![20.0, 20.0]).unwrap()
    }

    #[test]
    fn forty_by_forty_lattice_has_1600_points() {
        let space = Space::Polytope(ConvexPolytope::from_box(&bx20()).unwrap());
        let data = lattice_dataset(&space, &bx20(), 40).unwrap();
        assert_eq!(data.len(), 1600);
        // The whole box is the set.
        assert_eq!(data.positives(), 1600);
        assert_eq!(data.points[0], vec![-20.0, -20.0]);
        assert_eq!(data.points[1599], vec![20.0, 20.0]);
    }

    #[test]
    fn triangle_label_count_matches_area_density() {
        let t1 = tri([[-15.0, -12.0], [2.0, -14.0], [-9.0, 6.0]]);
        let t2 = tri([[5.0, 0.5], [17.5, 3.0], [9.0, 16.0]]);
        let space = Space::Union(vec![t1.clone(), t2.clone()]);
        let data = lattice_dataset(&space, &bx20(), 40).unwrap();
        let recount = data
            .points
            .iter()
            .filter(|p| t1.contains(p).unwrap() || t2.contains(p).unwrap())
            .count();
        assert_eq!(data.positives(), recount);
        let h = 40.0 / 39.0;
        let area = t1.area().unwrap() + t2.area().unwrap();
        let perim = t1.perimeter().unwrap() + t2.perimeter().unwrap();
        let expected = area / (h * h);
        assert!((data.positives() as f64 - expected).abs() <= 2.0 * perim / h);
    }

    #[test]
    fn lattice_needs_two_points_per_axis() {
        let space = Space::Polytope(ConvexPolytope::from_box(&bx20()).unwrap());
        assert!(lattice_dataset(&space, &bx20(), 1).is_err());
    }

    #[test]
    fn csv_exports() {
        assert_eq!(loss_curve_csv(&[0.5, 0.25]), "epoch,loss\n0,0.5\n1,0.25\n");
        let net = Network::new(2, vec![]).unwrap();
        assert!(prediction_grid_csv(&net, &[vec![1.0, 2.0]]).is_err());
    }
}
