use serde::{Deserialize, Serialize};

use super::{check_dim, Simplex};
use crate::error::GeometryError;

/// A simplicial complex given by its facets (maximal simplices).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    ambient_dim: usize,
    facets: Vec<Simplex>,
}

/// Facet counts per intrinsic dimension, `counts[j] = k_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionHistogram {
    pub counts: Vec<usize>,
    pub ambient_dim: usize,
}

impl DimensionHistogram {
    pub fn new(counts: Vec<usize>, ambient_dim: usize) -> Result<Self, GeometryError> {
        if ambient_dim == 0 {
            return Err(GeometryError::InvalidParameter(
                "ambient dimension must be positive".into(),
            ));
        }
        if counts.len() > ambient_dim + 1 {
            return Err(GeometryError::InvalidParameter(format!(
                "{} facet dimensions exceed ambient dimension {ambient_dim}",
                counts.len()
            )));
        }
        Ok(Self {
            counts,
            ambient_dim,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `k_j`, zero beyond the stored range.
    pub fn get(&self, j: usize) -> usize {
        self.counts.get(j).copied().unwrap_or(0)
    }
}

impl SimplicialComplex {
    pub fn new(facets: Vec<Simplex>) -> Result<Self, GeometryError> {
        let Some(first) = facets.first() else {
            return Err(GeometryError::InvalidComplex("no facets".into()));
        };
        let ambient_dim = first.ambient_dim();
        for f in &facets {
            check_dim(ambient_dim, &f.vertices()[0])?;
        }
        for (i, a) in facets.iter().enumerate() {
            for (j, b) in facets.iter().enumerate() {
                if i != j && is_face_of(a, b) {
                    return Err(GeometryError::InvalidComplex(format!(
                        "facet {i} is a face of facet {j}"
                    )));
                }
            }
        }
        Ok(Self {
            ambient_dim,
            facets,
        })
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dimension_histogram(&self) -> DimensionHistogram {
        let top = self.facets.iter().map(Simplex::dim).max().unwrap_or(0);
        let mut counts = vec![0; top + 1];
        for f in &self.facets {
            counts[f.dim()] += 1;
        }
        DimensionHistogram {
            counts,
            ambient_dim: self.ambient_dim,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, GeometryError> {
        for f in &self.facets {
            if f.contains(x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        let mut best = f64::INFINITY;
        for f in &self.facets {
            best = best.min(f.distance(x)?);
        }
        Ok(best)
    }
}

fn is_face_of(a: &Simplex, b: &Simplex) -> bool {
    a.vertices().len() <= b.vertices().len()
        && a.vertices().iter().all(|va| {
            b.vertices().iter().any(|vb| {
                va.iter()
                    .zip(vb)
                    .all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()))
            })
        })
}
