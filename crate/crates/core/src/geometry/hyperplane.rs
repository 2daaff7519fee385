use serde::{Deserialize, Serialize};

use super::{check_finite, dot, norm};
use crate::error::GeometryError;

/// Closed half-space `{x : normal · x + offset >= 0}` with a unit inward normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
}

impl Hyperplane {
    /// Builds a half-space from any nonzero normal; both normal and offset
    /// are rescaled so the stored normal has unit length.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self, GeometryError> {
        check_finite(&normal)?;
        if !offset.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let len = norm(&normal);
        if len == 0.0 || !len.is_finite() {
            return Err(GeometryError::ZeroNormal);
        }
        if (len - 1.0).abs() <= 1e-15 {
            return Ok(Self { normal, offset });
        }
        Ok(Self {
            normal: normal.iter().map(|v| v / len).collect(),
            offset: offset / len,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Signed distance `normal · x + offset`; positive on the inner side.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) + self.offset
    }

    pub(crate) fn translated(&self, shift: &[f64]) -> Self {
        Self {
            normal: self.normal.clone(),
            offset: self.offset - dot(&self.normal, shift),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_on_construction() {
        let h = Hyperplane::new(vec![3.0, 4.0], 10.0).unwrap();
        assert!((norm(h.normal()) - 1.0).abs() < 1e-12);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        assert!((h.eval(&[0.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_normal() {
        assert_eq!(
            Hyperplane::new(vec![0.0, 0.0], 1.0),
            Err(GeometryError::ZeroNormal)
        );
    }

    #[test]
    fn translation_moves_the_plane() {
        let h = Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap();
        let t = h.translated(&[2.0, 5.0]);
        assert_eq!(t.eval(&[2.0, 0.0]), 0.0);
    }
}
