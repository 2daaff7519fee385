//! Euclidean projection onto an intersection of half-spaces by Dykstra's
//! alternating projection scheme.

use super::{dist, Hyperplane};
use crate::error::GeometryError;

pub const MAX_CYCLES: usize = 10_000;
const STEP_TOL: f64 = 1e-12;
const VIOLATION_TOL: f64 = 1e-12;

/// Projects `x` onto `{y : h_i(y) >= 0 for all i}`.
///
/// Stops once a full cycle moves the iterate by less than `1e-12` (relative
/// to the scale of `x`) and no constraint is violated by more than `1e-12`.
pub fn project(x: &[f64], faces: &[Hyperplane]) -> Result<Vec<f64>, GeometryError> {
    let dim = x.len();
    let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut y = x.to_vec();
    let mut increments = vec![0.0; faces.len() * dim];
    let mut z = vec![0.0; dim];
    let mut prev = y.clone();
    let mut violation = f64::INFINITY;
    for _ in 0..MAX_CYCLES {
        prev.copy_from_slice(&y);
        for (i, face) in faces.iter().enumerate() {
            let inc = &mut increments[i * dim..(i + 1) * dim];
            for k in 0..dim {
                z[k] = y[k] + inc[k];
            }
            let s = face.eval(&z);
            let n = face.normal();
            if s < 0.0 {
                for k in 0..dim {
                    y[k] = z[k] - s * n[k];
                    inc[k] = s * n[k];
                }
            } else {
                y.copy_from_slice(&z);
                inc.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        violation = faces
            .iter()
            .map(|f| (-f.eval(&y)).max(0.0))
            .fold(0.0, f64::max);
        let step = dist(&y, &prev);
        if step <= STEP_TOL * scale && violation <= VIOLATION_TOL * scale {
            return Ok(y);
        }
    }
    Err(GeometryError::NotConverged {
        best: dist(x, &y),
        residual: violation,
        iterations: MAX_CYCLES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Hyperplane> {
        vec![
            Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap(),
            Hyperplane::new(vec![-1.0, 0.0], 1.0).unwrap(),
            Hyperplane::new(vec![0.0, 1.0], 0.0).unwrap(),
            Hyperplane::new(vec![0.0, -1.0], 1.0).unwrap(),
        ]
    }

    #[test]
    fn projects_onto_square_corner() {
        let p = project(&[2.0, 2.0], &square()).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!((p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_point_is_fixed() {
        let p = project(&[0.3, 0.6], &square()).unwrap();
        assert_eq!(p, vec![0.3, 0.6]);
    }

    #[test]
    fn acute_wedge_converges_to_apex() {
        // Wedge |y| <= tan(5 deg) x opening toward +x, capped at x = 10.
        let a = 5f64.to_radians();
        let faces = vec![
            Hyperplane::new(vec![a.sin(), a.cos()], 0.0).unwrap(),
            Hyperplane::new(vec![a.sin(), -a.cos()], 0.0).unwrap(),
            Hyperplane::new(vec![-1.0, 0.0], 10.0).unwrap(),
        ];
        let p = project(&[-1.0, 0.2], &faces).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-9), "{:?}", p);
    }
}
