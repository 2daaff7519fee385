use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AxisBox, ConvexPolytope, CuboidHoleSpace, SimplicialComplex};
use crate::error::GeometryError;

/// Set difference `union(positives) - union(negatives)` with the shell width
/// used for the negative gates.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencePlan {
    pub positives: Vec<ConvexPolytope>,
    pub negatives: Vec<ConvexPolytope>,
    /// Shell width for negative gates; `None` means one tenth of the build width.
    pub inner_shell: Option<f64>,
}

impl DifferencePlan {
    pub fn new(
        positives: Vec<ConvexPolytope>,
        negatives: Vec<ConvexPolytope>,
        inner_shell: Option<f64>,
    ) -> Result<Self, GeometryError> {
        if positives.is_empty() {
            return Err(GeometryError::InvalidParameter(
                "difference needs at least one positive polytope".into(),
            ));
        }
        let d = positives[0].dim();
        for p in positives.iter().chain(&negatives) {
            if p.dim() != d {
                return Err(GeometryError::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
        }
        if let Some(s) = inner_shell {
            if !(s > 0.0) || !s.is_finite() {
                return Err(GeometryError::InvalidParameter(format!(
                    "inner shell must be positive, got {s}"
                )));
            }
        }
        Ok(Self {
            positives,
            negatives,
            inner_shell,
        })
    }

    pub fn inner_shell_for(&self, eps: f64) -> f64 {
        self.inner_shell.unwrap_or(eps / 10.0)
    }

    pub fn dim(&self) -> usize {
        self.positives[0].dim()
    }

    /// True when `x` lies in the open interior of some negative polytope.
    pub fn in_removed(&self, x: &[f64]) -> bool {
        self.negatives
            .iter()
            .any(|q| q.faces().iter().all(|f| f.eval(x) > super::MEMBERSHIP_TOL))
    }
}

/// Result of classifying a point against a set `X` and a shell width `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShellClass {
    Inside,
    Shell,
    Outside,
}

/// Every kind of set the builders and the verifier understand.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Polytope(ConvexPolytope),
    Union(Vec<ConvexPolytope>),
    Difference(DifferencePlan),
    Complex(SimplicialComplex),
    CuboidHoles(CuboidHoleSpace),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Polytope(p) => p.dim(),
            Space::Union(ps) => ps[0].dim(),
            Space::Difference(d) => d.dim(),
            Space::Complex(k) => k.ambient_dim(),
            Space::CuboidHoles(c) => c.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, GeometryError> {
        super::check_dim(self.dim(), x)?;
        Ok(match self {
            Space::Polytope(p) => p.contains_unchecked(x),
            Space::Union(ps) => ps.iter().any(|p| p.contains_unchecked(x)),
            Space::Difference(d) => {
                d.positives.iter().any(|p| p.contains_unchecked(x)) && !d.in_removed(x)
            }
            Space::Complex(k) => k.contains(x)?,
            Space::CuboidHoles(c) => c.contains(x)?,
        })
    }

    /// Euclidean distance to the set.
    ///
    /// For differences this is a lower bound: `max(dist(x, union P), depth of
    /// x inside a removed polytope)`, exact when the negatives are disjoint
    /// and lie inside the positives.
    pub fn distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        super::check_dim(self.dim(), x)?;
        match self {
            Space::Polytope(p) => p.distance(x),
            Space::Union(ps) => union_distance(ps, x, f64::INFINITY),
            Space::Difference(d) => {
                if self.contains(x)? {
                    return Ok(0.0);
                }
                let mut lb = union_distance(&d.positives, x, f64::INFINITY)?;
                for q in &d.negatives {
                    let depth = q
                        .faces()
                        .iter()
                        .map(|f| f.eval(x))
                        .fold(f64::INFINITY, f64::min);
                    lb = lb.max(depth);
                }
                Ok(lb)
            }
            Space::Complex(k) => k.distance(x),
            Space::CuboidHoles(c) => c.distance(x),
        }
    }

    /// INSIDE iff `x` is a member, OUTSIDE iff `distance >= eps`, SHELL otherwise.
    pub fn classify(&self, x: &[f64], eps: f64) -> Result<ShellClass, GeometryError> {
        if !(eps > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "shell width must be positive, got {eps}"
            )));
        }
        if self.contains(x)? {
            return Ok(ShellClass::Inside);
        }
        let d = match self {
            Space::Polytope(p) => {
                if p.max_violation(x) >= eps {
                    return Ok(ShellClass::Outside);
                }
                p.distance(x)?
            }
            Space::Union(ps) => union_distance(ps, x, eps)?,
            _ => self.distance(x)?,
        };
        Ok(if d >= eps {
            ShellClass::Outside
        } else {
            ShellClass::Shell
        })
    }

    pub fn bounding_box(&self) -> AxisBox {
        match self {
            Space::Polytope(p) => p.bounding_box(),
            Space::Union(ps) => union_box(ps),
            Space::Difference(d) => union_box(&d.positives),
            Space::Complex(k) => {
                let pts: Vec<Vec<f64>> = k
                    .facets()
                    .iter()
                    .flat_map(|f| f.vertices().iter().cloned())
                    .collect();
                AxisBox::hull(&pts)
            }
            Space::CuboidHoles(c) => c.outer().clone(),
        }
    }

    /// Draws a member point; `None` if `attempts` rejections all failed.
    pub fn sample_inside<R: Rng + ?Sized>(&self, rng: &mut R, attempts: usize) -> Option<Vec<f64>> {
        if let Space::Complex(k) = self {
            let facet = &k.facets()[rng.random_range(0..k.facets().len())];
            let weights: Vec<f64> = facet
                .vertices()
                .iter()
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let total: f64 = weights.iter().sum();
            let mut x = vec![0.0; k.ambient_dim()];
            for (w, v) in weights.iter().zip(facet.vertices()) {
                x.iter_mut().zip(v).for_each(|(a, b)| *a += w / total * b);
            }
            return Some(x);
        }
        let bx = self.bounding_box();
        for _ in 0..attempts {
            let x = uniform_in(&bx, rng);
            if self.contains(&x).unwrap_or(false) {
                return Some(x);
            }
        }
        None
    }

    /// Closed-form `mu(B_delta(X) \ X)` where one exists (convex polygons).
    pub fn analytic_shell_measure(&self, delta: f64) -> Option<f64> {
        match self {
            Space::Polytope(p) if p.dim() == 2 => {
                Some(p.perimeter()? * delta + std::f64::consts::PI * delta * delta)
            }
            _ => None,
        }
    }
}

pub(crate) fn uniform_in<R: Rng + ?Sized>(bx: &AxisBox, rng: &mut R) -> Vec<f64> {
    bx.min()
        .iter()
        .zip(bx.max())
        .map(|(a, b)| a + (b - a) * rng.random::<f64>())
        .collect()
}

fn union_box(ps: &[ConvexPolytope]) -> AxisBox {
    ps.iter()
        .map(ConvexPolytope::bounding_box)
        .reduce(|a, b| a.union(&b))
        .expect("nonempty union")
}

/// Minimum distance to a union; members whose violation lower bound already
/// exceeds `cap` or the running best are skipped.
fn union_distance(ps: &[ConvexPolytope], x: &[f64], cap: f64) -> Result<f64, GeometryError> {
    let mut best = cap;
    for p in ps {
        if p.contains_unchecked(x) {
            return Ok(0.0);
        }
        if p.max_violation(x) >= best {
            continue;
        }
        best = best.min(p.distance(x)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Simplex;

    fn unit_square() -> Space {
        Space::Polytope(
            ConvexPolytope::from_box(&AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn classify_examples() {
        let s = unit_square();
        assert_eq!(s.classify(&[0.5, 0.5], 0.1).unwrap(), ShellClass::Inside);
        assert_eq!(s.classify(&[1.05, 0.5], 0.1).unwrap(), ShellClass::Shell);
        assert_eq!(s.classify(&[3.0, 3.0], 0.1).unwrap(), ShellClass::Outside);
        assert!(s.classify(&[0.5], 0.1).is_err());
    }

    #[test]
    fn difference_distance_inside_hole() {
        let outer =
            ConvexPolytope::from_box(&AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap())
                .unwrap();
        let hole = ConvexPolytope::from_box(&AxisBox::new(vec![0.3, 0.3], vec![0.7, 0.7]).unwrap())
            .unwrap();
        let s = Space::Difference(DifferencePlan::new(vec![outer], vec![hole], None).unwrap());
        assert!((s.distance(&[0.5, 0.5]).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(s.distance(&[0.3, 0.5]).unwrap(), 0.0);
        assert!((s.distance(&[1.5, 0.5]).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn complex_samples_lie_on_facets() {
        let seg = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let s = Space::Complex(SimplicialComplex::new(vec![seg]).unwrap());
        let mut rng = crate::rng::stream(3, 0);
        for _ in 0..100 {
            let x = s.sample_inside(&mut rng, 10).unwrap();
            assert!((x[0] - x[1]).abs() < 1e-12);
            assert!(s.contains(&x).unwrap());
        }
    }

    #[test]
    fn square_shell_measure() {
        let m = unit_square().analytic_shell_measure(0.0625).unwrap();
        assert!((m - (0.25 + std::f64::consts::PI * 0.0625f64.powi(2))).abs() < 1e-12);
    }
}
