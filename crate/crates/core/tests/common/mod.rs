//! Planar fixtures shared by the integration tests.
//!
//! Shapes are laid out in lattice-index coordinates of the 40x40 grid on
//! `[-20, 20]^2` with every edge on a half-integer line, so no lattice point
//! sits on or near a boundary.
#![allow(dead_code)]

use polynet::{AxisBox, ConvexPolytope, DifferencePlan, Space};

pub const RESOLUTION: usize = 40;

pub fn grid_step() -> f64 {
    40.0 / (RESOLUTION - 1) as f64
}

pub fn lattice_box() -> AxisBox {
    AxisBox::new(vec![-20.0, -20.0], vec![20.0, 20.0]).unwrap()
}

fn polygon(index_coords: &[[f64; 2]]) -> ConvexPolytope {
    let h = grid_step();
    let pts: Vec<[f64; 2]> = index_coords
        .iter()
        .map(|&[u, v]| [-20.0 + u * h, -20.0 + v * h])
        .collect();
    ConvexPolytope::from_polygon(&pts).unwrap()
}

/// Two right triangles meeting near the centre of the lattice.
pub fn two_triangles() -> Vec<ConvexPolytope> {
    vec![
        polygon(&[[18.5, 18.5], [12.0, 18.5], [18.5, 12.0]]),
        polygon(&[[20.5, 20.5], [27.0, 20.5], [20.5, 27.0]]),
    ]
}

pub fn hexagon() -> ConvexPolytope {
    polygon(&[
        [17.0, 4.5],
        [22.0, 4.5],
        [37.0, 19.5],
        [22.0, 34.5],
        [17.0, 34.5],
        [2.0, 19.5],
    ])
}

pub fn pentagon() -> ConvexPolytope {
    polygon(&[
        [14.5, 13.5],
        [24.5, 13.5],
        [24.5, 20.0],
        [19.5, 25.0],
        [14.5, 20.0],
    ])
}

pub fn hexagon_minus_pentagon() -> DifferencePlan {
    DifferencePlan::new(vec![hexagon()], vec![pentagon()], None).unwrap()
}

pub fn two_triangle_space() -> Space {
    Space::Union(two_triangles())
}

/// Convex polygons with 3 to 8 vertices on a random ellipse; consecutive
/// angular gaps stay between roughly 0.5 and 2.7 radians.
pub fn convex_polygon() -> impl proptest::strategy::Strategy<Value = ConvexPolytope> {
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};
    (
        prop::collection::vec(1.0f64..1.5, 3..=8),
        0.0..TAU,
        0.5f64..2.0,
        0.5f64..2.0,
        0.0..PI,
        -3.0f64..3.0,
        -3.0f64..3.0,
    )
        .prop_map(|(gaps, start, a, b, rot, cx, cy)| {
            let total: f64 = gaps.iter().sum();
            let mut t = start;
            let pts: Vec<[f64; 2]> = gaps
                .iter()
                .map(|g| {
                    let (x, y) = (a * t.cos(), b * t.sin());
                    t += g / total * TAU;
                    [
                        cx + x * rot.cos() - y * rot.sin(),
                        cy + x * rot.sin() + y * rot.cos(),
                    ]
                })
                .collect();
            ConvexPolytope::from_polygon(&pts).expect("ellipse polygon is convex")
        })
}

/// Simplex in `[0, 1]^d` with every height at least 0.05.
pub fn simplex(d: usize) -> impl proptest::strategy::Strategy<Value = polynet::Simplex> {
    use proptest::prelude::*;
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, d), d + 1).prop_filter_map(
        "flat simplex",
        |verts| {
            let s = polynet::Simplex::new(verts.clone()).ok()?;
            let poly = s.facet_hyperplanes().ok()?;
            let tall = poly
                .faces()
                .iter()
                .all(|f| verts.iter().map(|v| f.eval(v)).fold(0.0, f64::max) >= 0.05);
            tall.then_some(s)
        },
    )
}
