//! Convex polytopes, simplices, simplicial complexes and cuboid-hole spaces.
//!
//! All predicates use the closed-set convention: a point on a face belongs to
//! the polytope. Half-spaces are stored with unit inward normals so that
//! `normal · x + offset` is the signed distance to the bounding hyperplane.

mod complex;
mod cuboid;
pub(crate) mod dykstra;
mod hyperplane;
pub(crate) mod nnls;
mod polytope;
mod simplex;
mod space;
pub mod spec_file;

pub use complex::{DimensionHistogram, SimplicialComplex};
pub use cuboid::{AxisBox, BettiProfile, CuboidHoleSpace};
pub use hyperplane::Hyperplane;
pub use polytope::{ConvexPolytope, MinkowskiWeights};
pub use simplex::Simplex;
pub use space::{DifferencePlan, ShellClass, Space};

use crate::error::GeometryError;

/// Tolerance on half-space constraints for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<(), GeometryError> {
    if x.len() != expected {
        return Err(GeometryError::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_finite(x: &[f64]) -> Result<(), GeometryError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GeometryError::NonFinite)
    }
}

/// Lexicographic k-subsets of `0..n`.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let mut c = out.clone();
            let mut i = k;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(c);
                }
            }
        };
        current = next;
        Some(out)
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerate_lexicographically() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(binomial(6, 3), 20);
    }
}

/// Orthonormal basis of the complement of `span(basis)` in `R^n`, obtained by
/// orthogonalizing the standard basis vectors in order against the span.
pub(crate) fn orthonormal_completion(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for b in basis {
        let mut v = b.clone();
        for _ in 0..2 {
            for q in &ortho {
                let p = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= p * qi);
            }
        }
        let len = norm(&v);
        if len > 1e-10 * (1.0 + norm(b)) {
            ortho.push(v.iter().map(|x| x / len).collect());
        }
    }
    let span = ortho.len();
    for axis in 0..n {
        if ortho.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        for _ in 0..2 {
            for q in &ortho {
                let p = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= p * qi);
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            ortho.push(v.iter().map(|x| x / len).collect());
        }
    }
    ortho.split_off(span)
}
