use nalgebra::{DMatrix, DVector};

use super::{
    check_dim, check_finite, combinations, dist, dot, orthonormal_completion, sub, ConvexPolytope,
    Hyperplane, MEMBERSHIP_TOL,
};
use crate::error::GeometryError;

/// An `m`-simplex in `R^d` given by `m + 1` affinely independent vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let Some(first) = vertices.first() else {
            return Err(GeometryError::DegenerateSimplex);
        };
        let d = first.len();
        if d == 0 {
            return Err(GeometryError::DegenerateSimplex);
        }
        for v in &vertices {
            check_dim(d, v)?;
            check_finite(v)?;
        }
        if vertices.len() > d + 1 {
            return Err(GeometryError::DegenerateSimplex);
        }
        let m = vertices.len() - 1;
        if m > 0 {
            let e = DMatrix::from_fn(d, m, |r, c| vertices[c + 1][r] - vertices[0][r]);
            let sv = e.singular_values();
            let smax = sv.iter().fold(0.0f64, |a, s| a.max(*s));
            let smin = sv.iter().fold(f64::INFINITY, |a, s| a.min(*s));
            if !(smin > 1e-9 * smax) {
                return Err(GeometryError::DegenerateSimplex);
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Intrinsic dimension `m`.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let n = self.vertices.len() as f64;
        let mut b = vec![0.0; self.ambient_dim()];
        for v in &self.vertices {
            b.iter_mut().zip(v).for_each(|(a, x)| *a += x / n);
        }
        b
    }

    fn edges(&self) -> Vec<Vec<f64>> {
        self.vertices[1..]
            .iter()
            .map(|v| sub(v, &self.vertices[0]))
            .collect()
    }

    /// Barycentric coordinates of the orthogonal projection of `x` onto the
    /// affine hull.
    pub fn barycentric(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.ambient_dim(), x)?;
        let idx: Vec<usize> = (0..self.vertices.len()).collect();
        Ok(affine_barycentric(&self.vertices, &idx, x))
    }

    /// H-representation of a full-dimensional simplex.
    ///
    /// Faces are listed in lexicographic order of the vertex subsets they
    /// pass through; each normal points toward the omitted vertex.
    pub fn facet_hyperplanes(&self) -> Result<ConvexPolytope, GeometryError> {
        let d = self.ambient_dim();
        if self.dim() != d {
            return Err(GeometryError::InvalidParameter(format!(
                "facet hyperplanes need a full-dimensional simplex, got a {}-simplex in R^{d}",
                self.dim()
            )));
        }
        let mut faces = Vec::with_capacity(d + 1);
        for combo in combinations(d + 1, d) {
            let omitted = (0..=d)
                .find(|i| !combo.contains(i))
                .expect("one omitted vertex");
            let base = &self.vertices[combo[0]];
            let edges: Vec<Vec<f64>> = combo[1..]
                .iter()
                .map(|&i| sub(&self.vertices[i], base))
                .collect();
            let mut normal = orthonormal_completion(&edges, d)
                .into_iter()
                .next()
                .ok_or(GeometryError::DegenerateSimplex)?;
            if dot(&normal, &sub(&self.vertices[omitted], base)) < 0.0 {
                normal.iter_mut().for_each(|v| *v = -*v);
            }
            let offset = -dot(&normal, base);
            faces.push(Hyperplane::new(normal, offset)?);
        }
        ConvexPolytope::with_vertices(faces, &self.vertices)
    }

    /// Full-dimensional simplex containing `self` and contained in the
    /// `eps/2`-neighbourhood of it.
    ///
    /// Extra vertices sit at the barycenter offset by `eps/4` along an
    /// orthonormal basis of the orthogonal complement of the affine hull,
    /// completed from the standard basis in axis order.
    pub fn cover(&self, eps: f64) -> Result<Simplex, GeometryError> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "cover width must be positive, got {eps}"
            )));
        }
        let d = self.ambient_dim();
        if self.dim() == d {
            return Ok(self.clone());
        }
        let directions = orthonormal_completion(&self.edges(), d);
        let center = self.barycenter();
        let mut vertices = self.vertices.clone();
        for u in directions.iter().take(d - self.dim()) {
            vertices.push(
                center
                    .iter()
                    .zip(u)
                    .map(|(c, ui)| c + 0.25 * eps * ui)
                    .collect(),
            );
        }
        Simplex::new(vertices)
    }

    /// Exact Euclidean projection by enumerating faces of the simplex.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.ambient_dim(), x)?;
        let n = self.vertices.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for size in (1..=n).rev() {
            for subset in combinations(n, size) {
                let bary = affine_barycentric(&self.vertices, &subset, x);
                if bary.iter().any(|b| *b < -1e-12) {
                    continue;
                }
                let mut p = vec![0.0; x.len()];
                for (&i, b) in subset.iter().zip(&bary) {
                    p.iter_mut()
                        .zip(&self.vertices[i])
                        .for_each(|(a, v)| *a += b * v);
                }
                let dd = dist(&p, x);
                if best.as_ref().is_none_or(|(bd, _)| dd < *bd) {
                    best = Some((dd, p));
                }
            }
        }
        Ok(best
            .map(|(_, p)| p)
            .unwrap_or_else(|| self.vertices[0].clone()))
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        let p = self.project(x)?;
        Ok(dist(&p, x))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, GeometryError> {
        let bary = self.barycentric(x)?;
        if bary.iter().any(|b| *b < -MEMBERSHIP_TOL) {
            return Ok(false);
        }
        if self.dim() == self.ambient_dim() {
            return Ok(true);
        }
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(self.distance(x)? <= MEMBERSHIP_TOL * scale)
    }
}

/// Barycentric coordinates (w.r.t. `vertices[subset]`) of the projection of
/// `x` onto the affine hull of that subset.
fn affine_barycentric(vertices: &[Vec<f64>], subset: &[usize], x: &[f64]) -> Vec<f64> {
    let base = &vertices[subset[0]];
    let m = subset.len() - 1;
    if m == 0 {
        return vec![1.0];
    }
    let d = base.len();
    let e = DMatrix::from_fn(d, m, |r, c| vertices[subset[c + 1]][r] - base[r]);
    let rhs = DVector::from_iterator(d, x.iter().zip(base).map(|(a, b)| a - b));
    let gram = e.transpose() * &e;
    let lam = gram
        .cholesky()
        .map(|ch| ch.solve(&(e.transpose() * rhs)))
        .map(|v| v.iter().copied().collect::<Vec<f64>>())
        .unwrap_or_else(|| vec![f64::NAN; m]);
    let mut out = Vec::with_capacity(m + 1);
    out.push(1.0 - lam.iter().sum::<f64>());
    out.extend(lam);
    out
}
