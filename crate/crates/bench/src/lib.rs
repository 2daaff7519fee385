//! Fixtures shared by the criterion benchmarks.

use polynet::{AxisBox, ConvexPolytope, DifferencePlan, Simplex, Space};

fn triangle(v: [[f64; 2]; 3]) -> ConvexPolytope {
    Simplex::new(v.iter().map(|p| p.to_vec()).collect())
        .and_then(|s| s.facet_hyperplanes())
        .expect("fixture triangle is valid")
}

pub fn two_triangles() -> Vec<ConvexPolytope> {
    vec![
        triangle([[-1.0, -1.0], [-7.7, -1.0], [-1.0, -7.7]]),
        triangle([[1.0, 1.0], [7.7, 1.0], [1.0, 7.7]]),
    ]
}

/// Regular `k`-gon of circumradius `r`.
pub fn regular_polygon(k: usize, r: f64) -> ConvexPolytope {
    let pts: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / k as f64;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    ConvexPolytope::from_polygon(&pts).expect("regular polygon is convex")
}

pub fn hexagon_minus_pentagon() -> Space {
    let plan = DifferencePlan::new(
        vec![regular_polygon(6, 15.0)],
        vec![regular_polygon(5, 6.0)],
        None,
    )
    .expect("pentagon lies inside the hexagon");
    Space::Difference(plan)
}

/// Unit simplex in `R^d`.
pub fn unit_simplex(d: usize) -> ConvexPolytope {
    let mut verts = vec![vec![0.0; d]];
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        verts.push(v);
    }
    Simplex::new(verts)
        .and_then(|s| s.facet_hyperplanes())
        .expect("unit simplex is valid")
}

pub fn lattice_box() -> AxisBox {
    AxisBox::new(vec![-20.0, -20.0], vec![20.0, 20.0]).expect("valid box")
}
