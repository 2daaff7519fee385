use rayon::prelude::*;

use super::gate::{gate_layers, gate_parts, GateParts};
use super::{check_eps, Build};
use crate::error::ConstructError;
use crate::geometry::{ConvexPolytope, CuboidHoleSpace, DifferencePlan, SimplicialComplex};
use crate::network::{Activation, Layer, Matrix, Network};

/// Weight `s` on gate outputs in the difference aggregation.
pub const AGGREGATE_SLOPE: f64 = 1.0 + 1.0 / 1024.0;

fn build_gates(polys: &[ConvexPolytope], eps: f64) -> Result<Vec<GateParts>, ConstructError> {
    polys.par_iter().map(|p| gate_parts(p, eps)).collect()
}

fn check_dims(polys: &[ConvexPolytope]) -> Result<usize, ConstructError> {
    let d = polys[0].dim();
    for p in polys {
        if p.dim() != d {
            return Err(crate::error::GeometryError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            }
            .into());
        }
    }
    Ok(d)
}

fn union_of_gates(d: usize, gates: Vec<GateParts>) -> Result<Build, ConstructError> {
    let mut layers = gate_layers(d, &gates, Activation::Relu);
    layers.push(Layer::max_pool());
    Ok(Build {
        network: Network::new(d, layers)?,
        gates: gates.into_iter().map(|g| g.certificate).collect(),
    })
}

/// `MAX` of clipped gates: 1 on the union, 0 outside its `eps`-neighbourhood.
pub fn union_indicator(cover: &[ConvexPolytope], eps: f64) -> Result<Build, ConstructError> {
    check_eps(eps)?;
    if cover.is_empty() {
        return Err(ConstructError::Empty("cover"));
    }
    let d = check_dims(cover)?;
    union_of_gates(d, build_gates(cover, eps)?)
}

/// Indicator of `union(P) - union(Q)`, four ReLU layers.
///
/// The third layer computes `a = relu(1 - s sum a_i)` and `b = relu(1 - s sum b_j)`
/// from the positive and negative gates; the output is `relu(b - a)`. With
/// `s` slightly above 1, a point inside some polytope drives its unit to a
/// pre-activation near `-(s - 1)` rather than exactly onto the kink.
pub fn difference_indicator(plan: &DifferencePlan, eps: f64) -> Result<Build, ConstructError> {
    check_eps(eps)?;
    if plan.positives.is_empty() {
        return Err(ConstructError::Empty("positives"));
    }
    let inner = plan.inner_shell_for(eps);
    if !(inner > 0.0) || inner > eps {
        return Err(ConstructError::InvalidPlan(format!(
            "inner shell {inner} must lie in (0, {eps}]"
        )));
    }
    let d = plan.dim();
    let all: Vec<ConvexPolytope> = plan
        .positives
        .iter()
        .chain(&plan.negatives)
        .cloned()
        .collect();
    check_dims(&all)?;
    let n_p = plan.positives.len();
    let gates: Vec<GateParts> = all
        .par_iter()
        .enumerate()
        .map(|(i, p)| gate_parts(p, if i < n_p { eps } else { inner }))
        .collect::<Result<_, _>>()?;
    let k = gates.len();
    let mut layers = gate_layers(d, &gates, Activation::Relu);
    let mut w3 = Matrix::zeros(2, k);
    for j in 0..k {
        w3.set(if j < n_p { 0 } else { 1 }, j, -AGGREGATE_SLOPE);
    }
    layers.push(Layer::new(w3, vec![1.0, 1.0], Activation::Relu));
    let w4 = Matrix::from_rows(&[vec![-1.0, 1.0]], 2).expect("1x2");
    layers.push(Layer::new(w4, vec![0.0], Activation::Relu));
    Ok(Build {
        network: Network::new(d, layers)?,
        gates: gates.into_iter().map(|g| g.certificate).collect(),
    })
}

/// Union of gates over full-dimensional covers of the facets, each built
/// with half the shell width.
pub fn complex_indicator(complex: &SimplicialComplex, eps: f64) -> Result<Build, ConstructError> {
    check_eps(eps)?;
    if complex.facets().is_empty() {
        return Err(ConstructError::Empty("complex"));
    }
    let covers: Vec<ConvexPolytope> = complex
        .facets()
        .iter()
        .map(|s| s.cover(eps)?.facet_hyperplanes())
        .collect::<Result<_, _>>()?;
    union_of_gates(complex.ambient_dim(), build_gates(&covers, eps / 2.0)?)
}

/// Outer box minus holes through the difference construction, with all
/// `2d` faces spent on every hole.
pub fn cuboid_hole_indicator(
    space: &CuboidHoleSpace,
    eps: f64,
    inner_shell: Option<f64>,
) -> Result<Build, ConstructError> {
    let outer = ConvexPolytope::from_box(space.outer())?;
    let holes = space
        .holes()
        .iter()
        .map(ConvexPolytope::from_box)
        .collect::<Result<Vec<_>, _>>()?;
    let plan = DifferencePlan::new(vec![outer], holes, inner_shell)?;
    difference_indicator(&plan, eps)
}
