mod common;

use polynet::{ShellClass, Simplex, Space};
use proptest::prelude::*;

fn point(d: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minkowski_identity_is_affine(
        poly in common::convex_polygon(),
        xs in prop::collection::vec(point(2, -10.0, 10.0), 100),
    ) {
        let mw = poly.minkowski_weights().unwrap();
        prop_assert!(mw.c.iter().all(|c| *c > 0.0));
        let mut residual = [0.0; 2];
        for (c, f) in mw.c.iter().zip(poly.faces()) {
            residual[0] += c * f.normal()[0];
            residual[1] += c * f.normal()[1];
        }
        let cnorm = mw.c.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!(residual[0].hypot(residual[1]) / cnorm <= 1e-10);
        for x in &xs {
            let s: f64 = mw.c.iter().zip(poly.faces()).map(|(c, f)| c * f.eval(x)).sum();
            prop_assert!((s - mw.v).abs() <= 1e-9 * mw.v.abs().max(1.0), "{s} vs {}", mw.v);
        }
    }

    #[test]
    fn distance_vanishes_exactly_on_the_set(
        poly in common::convex_polygon(),
        xs in prop::collection::vec(point(2, -6.0, 6.0), 200),
    ) {
        for x in &xs {
            let inside = poly.contains(x).unwrap();
            let dist = poly.distance(x).unwrap();
            prop_assert_eq!(inside, dist == 0.0, "x = {:?}, distance {}", x, dist);
        }
    }

    #[test]
    fn simplex_membership_matches_barycentric(
        s in common::simplex(3),
        xs in prop::collection::vec(point(3, -0.2, 1.2), 300),
    ) {
        let poly = s.facet_hyperplanes().unwrap();
        for x in &xs {
            let bary = s.barycentric(x).unwrap();
            let by_coords = bary.iter().all(|l| *l >= -1e-12);
            let margin = bary.iter().cloned().fold(f64::INFINITY, f64::min).abs();
            if margin > 1e-9 {
                prop_assert_eq!(poly.contains(x).unwrap(), by_coords);
            }
        }
    }

    #[test]
    fn cover_contains_the_face_and_stays_close(
        verts in prop::collection::vec(point(3, 0.0, 1.0), 2..=3),
        eps in 0.01f64..0.5,
    ) {
        let Ok(face) = Simplex::new(verts) else { return Ok(()); };
        prop_assume!(face.dim() + 1 == face.vertices().len());
        let cover = face.cover(eps).unwrap();
        prop_assert_eq!(cover.dim(), 3);
        for v in face.vertices() {
            prop_assert!(cover.barycentric(v).unwrap().iter().all(|l| *l >= -1e-10));
        }
        for v in cover.vertices() {
            prop_assert!(face.distance(v).unwrap() <= eps / 2.0 + 1e-12);
        }
    }

    #[test]
    fn outside_is_monotone_in_eps(
        poly in common::convex_polygon(),
        x in point(2, -6.0, 6.0),
        e1 in 0.01f64..1.0,
        e2 in 0.01f64..1.0,
    ) {
        let (small, large) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let space = Space::Polytope(poly);
        if space.classify(&x, large).unwrap() == ShellClass::Outside {
            prop_assert_eq!(space.classify(&x, small).unwrap(), ShellClass::Outside);
        }
    }
}
