use serde::{Deserialize, Serialize};

use super::{check_dim, check_finite};
use crate::error::GeometryError;

/// Closed axis-aligned box `[min, max]` with `min < max` on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl AxisBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self, GeometryError> {
        check_dim(min.len(), &max)?;
        check_finite(&min)?;
        check_finite(&max)?;
        if min.is_empty() || min.iter().zip(&max).any(|(a, b)| !(a < b)) {
            return Err(GeometryError::InvalidParameter(format!(
                "box needs min < max on every axis: {min:?} vs {max:?}"
            )));
        }
        Ok(Self { min, max })
    }

    /// Smallest box containing the points; degenerate axes are widened by 1e-9.
    pub(crate) fn hull(points: &[Vec<f64>]) -> Self {
        let d = points[0].len();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for p in points {
            for k in 0..d {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        for k in 0..d {
            if max[k] - min[k] < 1e-9 {
                min[k] -= 1e-9;
                max[k] += 1e-9;
            }
        }
        Self { min, max }
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn volume(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).product()
    }

    pub fn inflate(&self, by: f64) -> Self {
        Self {
            min: self.min.iter().map(|v| v - by).collect(),
            max: self.max.iter().map(|v| v + by).collect(),
        }
    }

    pub fn union(&self, other: &AxisBox) -> Self {
        Self {
            min: self
                .min
                .iter()
                .zip(&other.min)
                .map(|(a, b)| a.min(*b))
                .collect(),
            max: self
                .max
                .iter()
                .zip(&other.max)
                .map(|(a, b)| a.max(*b))
                .collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    pub fn contains_box(&self, other: &AxisBox, tol: f64) -> bool {
        (0..self.dim())
            .all(|k| other.min[k] >= self.min[k] - tol && other.max[k] <= self.max[k] + tol)
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|k| self.min[k].max(other.min[k]) < self.max[k].min(other.max[k]))
    }

    pub fn in_interior(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(v, (a, b))| *v > *a && *v < *b)
    }

    /// Distance from `x` to the box (zero inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(v, (a, b))| {
                let e = (a - v).max(0.0).max(v - b);
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior point to the boundary.
    pub fn depth(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(v, (a, b))| (v - a).min(b - v))
            .fold(f64::INFINITY, f64::min)
    }
}

/// An outer box with pairwise-disjoint open boxes removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CuboidHoleSpace {
    outer: AxisBox,
    holes: Vec<AxisBox>,
}

impl CuboidHoleSpace {
    pub fn new(outer: AxisBox, holes: Vec<AxisBox>) -> Result<Self, GeometryError> {
        for (i, h) in holes.iter().enumerate() {
            check_dim(outer.dim(), h.min())?;
            if !outer.contains_box(h, 1e-12) {
                return Err(GeometryError::InvalidCuboid(format!(
                    "hole {i} is not inside the outer box"
                )));
            }
            for (j, g) in holes.iter().enumerate().skip(i + 1) {
                if h.interiors_overlap(g) {
                    return Err(GeometryError::InvalidCuboid(format!(
                        "holes {i} and {j} overlap"
                    )));
                }
            }
        }
        Ok(Self { outer, holes })
    }

    pub fn outer(&self) -> &AxisBox {
        &self.outer
    }

    pub fn holes(&self) -> &[AxisBox] {
        &self.holes
    }

    pub fn dim(&self) -> usize {
        self.outer.dim()
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, GeometryError> {
        check_dim(self.dim(), x)?;
        Ok(self.outer.contains(x) && !self.holes.iter().any(|h| h.in_interior(x)))
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        check_dim(self.dim(), x)?;
        if !self.outer.contains(x) {
            return Ok(self.outer.distance(x));
        }
        // Holes are disjoint, so an interior point sees only its own hole's boundary.
        Ok(self
            .holes
            .iter()
            .find(|h| h.in_interior(x))
            .map_or(0.0, |h| h.depth(x)))
    }
}

/// Betti numbers `beta_0 ..= beta_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    betti: Vec<usize>,
}

impl BettiProfile {
    pub fn new(betti: Vec<usize>) -> Result<Self, GeometryError> {
        if betti.first().copied().unwrap_or(0) < 1 {
            return Err(GeometryError::InvalidParameter(
                "beta_0 must be at least 1".into(),
            ));
        }
        Ok(Self { betti })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.betti
    }

    /// Ambient dimension implied by the profile length.
    pub fn dim(&self) -> usize {
        self.betti.len() - 1
    }

    /// Topological complexity `sum_k beta_k`.
    pub fn total(&self) -> usize {
        self.betti.iter().sum()
    }
}
