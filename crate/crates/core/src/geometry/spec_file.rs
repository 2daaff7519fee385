//! JSON geometry descriptions.
//!
//! ```json
//! {"kind": "polytope", "normals": [[1, 0], [-1, 0], [0, 1], [0, -1]], "offsets": [0, 1, 0, 1]}
//! {"kind": "union", "polytopes": [{"vertices": [[0, 0], [1, 0], [0, 1]]}]}
//! {"kind": "difference", "positives": [...], "negatives": [...], "inner_shell": 0.01}
//! {"kind": "complex", "facets": [[[0, 0], [1, 0]], [[1, 0], [1, 1]]]}
//! {"kind": "cuboid_holes", "outer": {"min": [0, 0], "max": [1, 1]}, "holes": [...]}
//! ```
//!
//! Any of them may carry `"epsilon"` (default build width) and, for cuboid
//! holes, `"betti"` (profile used to cross-check widths).

use serde::{Deserialize, Serialize};

use super::{
    AxisBox, ConvexPolytope, CuboidHoleSpace, DifferencePlan, Hyperplane, Simplex,
    SimplicialComplex, Space,
};
use crate::error::GeometryError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PolytopeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    /// Vertex form: a convex polygon in cyclic order, or a full-dimensional simplex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometrySpec {
    Polytope {
        #[serde(flatten)]
        polytope: PolytopeSpec,
    },
    Union {
        polytopes: Vec<PolytopeSpec>,
    },
    Difference {
        positives: Vec<PolytopeSpec>,
        #[serde(default)]
        negatives: Vec<PolytopeSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner_shell: Option<f64>,
    },
    Complex {
        facets: Vec<Vec<Vec<f64>>>,
    },
    CuboidHoles {
        outer: BoxSpec,
        #[serde(default)]
        holes: Vec<BoxSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryFile {
    #[serde(flatten)]
    pub geometry: GeometrySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<Vec<usize>>,
}

impl GeometryFile {
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(text).map_err(|e| {
            GeometryError::Spec(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry spec serializes")
    }
}

impl PolytopeSpec {
    pub fn from_polytope(p: &ConvexPolytope) -> Self {
        Self {
            normals: Some(p.faces().iter().map(|f| f.normal().to_vec()).collect()),
            offsets: Some(p.faces().iter().map(Hyperplane::offset).collect()),
            vertices: None,
        }
    }

    pub fn to_polytope(&self) -> Result<ConvexPolytope, GeometryError> {
        match (&self.normals, &self.offsets, &self.vertices) {
            (Some(n), Some(b), None) => {
                if n.len() != b.len() {
                    return Err(GeometryError::Spec(format!(
                        "{} normals but {} offsets",
                        n.len(),
                        b.len()
                    )));
                }
                let faces = n
                    .iter()
                    .zip(b)
                    .map(|(n, b)| Hyperplane::new(n.clone(), *b))
                    .collect::<Result<Vec<_>, _>>()?;
                ConvexPolytope::new(faces)
            }
            (None, None, Some(v)) if v.len() >= 3 && v.iter().all(|p| p.len() == 2) => {
                let pts: Vec<[f64; 2]> = v.iter().map(|p| [p[0], p[1]]).collect();
                ConvexPolytope::from_polygon(&pts)
            }
            (None, None, Some(v)) => {
                let s = Simplex::new(v.clone())?;
                if s.dim() != s.ambient_dim() {
                    return Err(GeometryError::Spec(
                        "vertex form needs a convex polygon or a full-dimensional simplex".into(),
                    ));
                }
                s.facet_hyperplanes()
            }
            _ => Err(GeometryError::Spec(
                "polytope needs either normals+offsets or vertices".into(),
            )),
        }
    }
}

impl BoxSpec {
    pub fn to_box(&self) -> Result<AxisBox, GeometryError> {
        AxisBox::new(self.min.clone(), self.max.clone())
    }
}

fn polytopes(specs: &[PolytopeSpec]) -> Result<Vec<ConvexPolytope>, GeometryError> {
    specs.iter().map(PolytopeSpec::to_polytope).collect()
}

impl GeometrySpec {
    pub fn to_space(&self) -> Result<Space, GeometryError> {
        match self {
            GeometrySpec::Polytope { polytope } => Ok(Space::Polytope(polytope.to_polytope()?)),
            GeometrySpec::Union { polytopes: specs } => {
                let ps = polytopes(specs)?;
                if ps.is_empty() {
                    return Err(GeometryError::Spec("union has no polytopes".into()));
                }
                let d = ps[0].dim();
                if let Some(bad) = ps.iter().find(|p| p.dim() != d) {
                    return Err(GeometryError::DimensionMismatch {
                        expected: d,
                        found: bad.dim(),
                    });
                }
                Ok(Space::Union(ps))
            }
            GeometrySpec::Difference {
                positives,
                negatives,
                inner_shell,
            } => Ok(Space::Difference(DifferencePlan::new(
                polytopes(positives)?,
                polytopes(negatives)?,
                *inner_shell,
            )?)),
            GeometrySpec::Complex { facets } => {
                let fs = facets
                    .iter()
                    .map(|v| Simplex::new(v.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Space::Complex(SimplicialComplex::new(fs)?))
            }
            GeometrySpec::CuboidHoles { outer, holes } => {
                Ok(Space::CuboidHoles(CuboidHoleSpace::new(
                    outer.to_box()?,
                    holes
                        .iter()
                        .map(BoxSpec::to_box)
                        .collect::<Result<_, _>>()?,
                )?))
            }
        }
    }
}
