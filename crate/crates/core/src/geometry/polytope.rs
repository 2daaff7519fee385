use nalgebra::{DMatrix, DVector};

use super::nnls::{least_distance, Ldp};
use super::{
    binomial, check_dim, combinations, dist, dykstra, norm, orthonormal_completion, AxisBox,
    Hyperplane, MEMBERSHIP_TOL,
};
use crate::error::GeometryError;

const VERTEX_ENUMERATION_CAP: u128 = 2_000_000;

/// Bounded convex polytope with nonempty interior in half-space form.
///
/// Construction certifies boundedness (a strictly positive null combination
/// of the normals exists) and a strictly interior point, and enumerates the
/// vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    dim: usize,
    faces: Vec<Hyperplane>,
    vertices: Vec<Vec<f64>>,
    interior: Vec<f64>,
}

/// Strictly positive weights with `sum c_i w_i = 0`, and `V = sum c_i b_i`.
///
/// For every `x`, `sum c_i (w_i . x + b_i) = V`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiWeights {
    pub c: Vec<f64>,
    pub v: f64,
}

impl ConvexPolytope {
    pub fn new(faces: Vec<Hyperplane>) -> Result<Self, GeometryError> {
        let Some(first) = faces.first() else {
            return Err(GeometryError::Degenerate("no faces".into()));
        };
        let dim = first.dim();
        if dim == 0 {
            return Err(GeometryError::Degenerate(
                "zero-dimensional ambient space".into(),
            ));
        }
        for f in &faces {
            if f.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    found: f.dim(),
                });
            }
        }
        minkowski(&faces)?;
        let vertices = enumerate_vertices(dim, &faces)?;
        if vertices.len() <= dim {
            return Err(GeometryError::Degenerate(format!(
                "only {} vertices found, need at least {}",
                vertices.len(),
                dim + 1
            )));
        }
        let mut interior = vec![0.0; dim];
        for v in &vertices {
            interior.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
        interior
            .iter_mut()
            .for_each(|a| *a /= vertices.len() as f64);
        let scale = 1.0 + interior.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let slack = faces
            .iter()
            .map(|f| f.eval(&interior))
            .fold(f64::INFINITY, f64::min);
        if slack <= 1e-9 * scale {
            return Err(GeometryError::Degenerate(
                "no strictly interior point (empty interior)".into(),
            ));
        }
        Ok(Self {
            dim,
            faces,
            vertices,
            interior,
        })
    }

    /// Builds the polytope and checks a caller-supplied vertex list against it.
    pub fn with_vertices(
        faces: Vec<Hyperplane>,
        vertices: &[Vec<f64>],
    ) -> Result<Self, GeometryError> {
        let poly = Self::new(faces)?;
        for v in vertices {
            check_dim(poly.dim, v)?;
            if poly.faces.iter().any(|f| f.eval(v) < -1e-9) {
                return Err(GeometryError::Degenerate(format!(
                    "vertex {v:?} violates a face constraint"
                )));
            }
        }
        Ok(poly)
    }

    /// Convex polygon from its vertices in cyclic order (either orientation),
    /// one face per edge.
    pub fn from_polygon(vertices: &[[f64; 2]]) -> Result<Self, GeometryError> {
        let k = vertices.len();
        if k < 3 {
            return Err(GeometryError::Degenerate(format!(
                "polygon needs at least 3 vertices, got {k}"
            )));
        }
        let twice_area: f64 = (0..k)
            .map(|i| {
                let (a, b) = (vertices[i], vertices[(i + 1) % k]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        let sign = twice_area.signum();
        let faces = (0..k)
            .map(|i| {
                let (a, b) = (vertices[i], vertices[(i + 1) % k]);
                let n = vec![-(b[1] - a[1]) * sign, (b[0] - a[0]) * sign];
                let off = -(n[0] * a[0] + n[1] * a[1]);
                Hyperplane::new(n, off)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let pts: Vec<Vec<f64>> = vertices.iter().map(|v| v.to_vec()).collect();
        let poly = Self::with_vertices(faces, &pts)?;
        if poly.vertices.len() != k {
            return Err(GeometryError::Degenerate(format!(
                "{k} vertices given but the polygon has {}",
                poly.vertices.len()
            )));
        }
        Ok(poly)
    }

    /// Axis-aligned box `[min, max]` as a polytope with `2d` faces, ordered
    /// `+e_1, -e_1, +e_2, -e_2, ...`.
    pub fn from_box(bx: &AxisBox) -> Result<Self, GeometryError> {
        let d = bx.dim();
        let mut faces = Vec::with_capacity(2 * d);
        for axis in 0..d {
            let mut n = vec![0.0; d];
            n[axis] = 1.0;
            faces.push(Hyperplane::new(n.clone(), -bx.min()[axis])?);
            n[axis] = -1.0;
            faces.push(Hyperplane::new(n, bx.max()[axis])?);
        }
        Self::new(faces)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn faces(&self) -> &[Hyperplane] {
        &self.faces
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, GeometryError> {
        check_dim(self.dim, x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        self.faces.iter().all(|f| f.eval(x) >= -MEMBERSHIP_TOL)
    }

    /// Largest constraint violation; a lower bound on the distance.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.faces
            .iter()
            .map(|f| -f.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Euclidean projection onto the polytope.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.dim, x)?;
        if self.contains_unchecked(x) {
            return Ok(x.to_vec());
        }
        dykstra::project(x, &self.faces)
    }

    /// Euclidean distance to the polytope, zero for members.
    pub fn distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        check_dim(self.dim, x)?;
        if self.contains_unchecked(x) {
            return Ok(0.0);
        }
        let p = dykstra::project(x, &self.faces)?;
        Ok(dist(x, &p))
    }

    pub fn minkowski_weights(&self) -> Result<MinkowskiWeights, GeometryError> {
        minkowski(&self.faces)
    }

    pub fn bounding_box(&self) -> AxisBox {
        AxisBox::hull(&self.vertices)
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        Self {
            dim: self.dim,
            faces: self.faces.iter().map(|f| f.translated(shift)).collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().zip(shift).map(|(a, b)| a + b).collect())
                .collect(),
            interior: self
                .interior
                .iter()
                .zip(shift)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Vertices of a planar polygon in counter-clockwise order.
    pub fn polygon_ccw(&self) -> Option<Vec<[f64; 2]>> {
        if self.dim != 2 {
            return None;
        }
        let c = &self.interior;
        let mut pts: Vec<[f64; 2]> = self.vertices.iter().map(|v| [v[0], v[1]]).collect();
        pts.sort_by(|a, b| {
            let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
            let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
            ta.total_cmp(&tb)
        });
        Some(pts)
    }

    /// Perimeter of a planar polygon.
    pub fn perimeter(&self) -> Option<f64> {
        let pts = self.polygon_ccw()?;
        Some(
            (0..pts.len())
                .map(|i| {
                    let a = pts[i];
                    let b = pts[(i + 1) % pts.len()];
                    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
                })
                .sum(),
        )
    }

    /// Area of a planar polygon (shoelace).
    pub fn area(&self) -> Option<f64> {
        let pts = self.polygon_ccw()?;
        let twice: f64 = (0..pts.len())
            .map(|i| {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        Some(twice.abs() / 2.0)
    }
}

fn minkowski(faces: &[Hyperplane]) -> Result<MinkowskiWeights, GeometryError> {
    let k = faces.len();
    let d = faces[0].dim();
    // Columns of `a` are the normals.
    let a = DMatrix::from_fn(d, k, |r, c| faces[c].normal()[r]);
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
    let row_space: Vec<Vec<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 1e-12 * smax.max(1.0))
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect();
    if row_space.len() < d {
        // Normals do not span R^d; unbounded along their orthogonal complement.
        return Err(unbounded(vec![0.0; d], &normals_of(faces)));
    }
    let null = orthonormal_completion(&row_space, k);
    if null.is_empty() {
        let ones = DVector::from_element(k, 1.0);
        let dir = a
            .transpose()
            .svd(true, true)
            .solve(&ones, 1e-14)
            .map(|v| v.iter().copied().collect::<Vec<f64>>())
            .unwrap_or_else(|_| vec![0.0; d]);
        return Err(unbounded(dir, &normals_of(faces)));
    }
    let q = null.len();
    let g = DMatrix::from_fn(k, q, |r, c| null[c][r]);
    let h = DVector::from_element(k, 1.0);
    match least_distance(&g, &h) {
        Ldp::Feasible(y) => {
            let raw = &g * y;
            let cmin = raw.iter().fold(f64::INFINITY, |m, v| m.min(*v));
            let cmax = raw.iter().fold(0.0f64, |m, v| m.max(*v));
            if !(cmin > 1e-8 * cmax) {
                return Err(GeometryError::Degenerate(
                    "Minkowski weights fall below the positivity floor".into(),
                ));
            }
            let c: Vec<f64> = raw.iter().map(|v| v / cmin).collect();
            let mut residual = vec![0.0; d];
            for (ci, f) in c.iter().zip(faces) {
                residual
                    .iter_mut()
                    .zip(f.normal())
                    .for_each(|(r, n)| *r += ci * n);
            }
            if norm(&residual) > 1e-10 * norm(&c) {
                return Err(GeometryError::Degenerate(format!(
                    "normal balance residual {:e} too large",
                    norm(&residual)
                )));
            }
            let v: f64 = c.iter().zip(faces).map(|(ci, f)| ci * f.offset()).sum();
            if !(v > 0.0) {
                return Err(GeometryError::Degenerate(
                    "weighted offset sum is not positive (empty interior)".into(),
                ));
            }
            Ok(MinkowskiWeights { c, v })
        }
        Ldp::Infeasible(u) => {
            // u >= 0 lies in the row space of the normal matrix: u = A^T v.
            let dir = a
                .transpose()
                .svd(true, true)
                .solve(&u, 1e-14)
                .map(|v| v.iter().copied().collect::<Vec<f64>>())
                .unwrap_or_else(|_| vec![0.0; d]);
            Err(unbounded(dir, &normals_of(faces)))
        }
    }
}

fn normals_of(faces: &[Hyperplane]) -> Vec<Vec<f64>> {
    faces.iter().map(|f| f.normal().to_vec()).collect()
}

fn unbounded(dir: Vec<f64>, normals: &[Vec<f64>]) -> GeometryError {
    let d = normals[0].len();
    let len = norm(&dir);
    let direction = if len > 1e-12 {
        dir.iter().map(|v| v / len).collect()
    } else {
        // Normals do not span R^d: any orthogonal direction recedes.
        orthonormal_completion(normals, d)
            .into_iter()
            .next()
            .unwrap_or_else(|| vec![0.0; d])
    };
    GeometryError::Unbounded { direction }
}

fn enumerate_vertices(d: usize, faces: &[Hyperplane]) -> Result<Vec<Vec<f64>>, GeometryError> {
    if binomial(faces.len(), d) > VERTEX_ENUMERATION_CAP {
        return Err(GeometryError::Degenerate(format!(
            "{} faces in dimension {d} exceed the vertex enumeration cap",
            faces.len()
        )));
    }
    let scale = 1.0 + faces.iter().fold(0.0f64, |m, f| m.max(f.offset().abs()));
    let mut out: Vec<Vec<f64>> = Vec::new();
    for combo in combinations(faces.len(), d) {
        let m = DMatrix::from_fn(d, d, |r, c| faces[combo[r]].normal()[c]);
        let rhs = DVector::from_iterator(d, combo.iter().map(|&i| -faces[i].offset()));
        let lu = m.clone().lu();
        let det = lu.determinant();
        if det.abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&rhs) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if faces.iter().all(|f| f.eval(&x) >= -1e-9 * scale)
            && !out.iter().any(|v| dist(v, &x) <= 1e-9 * scale)
        {
            out.push(x);
        }
    }
    Ok(out)
}
