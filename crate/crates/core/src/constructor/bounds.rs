use serde::Serialize;

use crate::error::ConstructError;
use crate::geometry::{BettiProfile, DimensionHistogram};
use crate::network::Architecture;

/// First-layer width bound for a simplicial complex, with both candidate
/// expressions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthBoundReport {
    pub bound: usize,
    pub packed: f64,
    pub mixed: f64,
    pub note: Option<String>,
}

/// `min{ k(d+1) - (d-1) floor(sum_{j<d/2} k_j / 2),
///       (d+1) [sum_{j<=d/2, k_j>0} (k_j (j+2)/(d-j) + (j+2)/(j+1)) + sum_{j>d/2} k_j] }`,
/// rounded down.
pub fn simplicial_width_report(d: usize, hist: &DimensionHistogram) -> WidthBoundReport {
    let k = hist.total() as f64;
    let df = d as f64;
    let low: usize = (0..=d).filter(|j| 2 * j < d).map(|j| hist.get(j)).sum();
    let packed = k * (df + 1.0) - (df - 1.0) * (low / 2) as f64;
    let mut inner = 0.0;
    for j in 0..=d {
        let kj = hist.get(j) as f64;
        if 2 * j <= d {
            if kj > 0.0 {
                let jf = j as f64;
                inner += kj * (jf + 2.0) / (df - jf) + (jf + 2.0) / (jf + 1.0);
            }
        } else {
            inner += kj;
        }
    }
    let mixed = (df + 1.0) * inner;
    let bound = (packed.min(mixed) + 1e-9).floor() as usize;
    let note = (d == 2 && hist.get(1) > 0).then(|| {
        let k1 = hist.get(1);
        format!(
            "polygon-boundary example quotes 3k - floor(k/2) = {} for k = {k1} edges; \
             the general formula gives {}",
            3 * k1 - k1 / 2,
            3 * k1
        )
    });
    WidthBoundReport {
        bound,
        packed,
        mixed,
        note,
    }
}

pub fn simplicial_width_bound(d: usize, hist: &DimensionHistogram) -> usize {
    simplicial_width_report(d, hist).bound
}

/// `d -> 2(d - 1 + sum (k+1) beta_k) -> sum beta_k -> 2 -> 1`, all ReLU.
pub fn betti_architecture(d: usize, betti: &BettiProfile) -> Result<Architecture, ConstructError> {
    let b = betti.as_slice();
    if b.len() > d + 1 {
        return Err(ConstructError::InvalidPlan(format!(
            "{} Betti numbers given for dimension {d}",
            b.len()
        )));
    }
    if d == 0 {
        return Err(ConstructError::InvalidPlan(
            "dimension must be positive".into(),
        ));
    }
    let weighted: usize = b.iter().enumerate().map(|(k, bk)| (k + 1) * bk).sum();
    Ok(Architecture::relu(vec![
        d,
        2 * (d - 1 + weighted),
        betti.total(),
        2,
        1,
    ])?)
}
