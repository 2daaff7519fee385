//! Weight synthesis for indicator and approximation networks, and the
//! closed-form width bounds.

mod bounds;
mod gate;
mod heads;
mod indicators;
mod lipschitz;

pub use bounds::{
    betti_architecture, simplicial_width_bound, simplicial_width_report, WidthBoundReport,
};
pub use gate::{clipped_gate, polytope_gate, GateCertificate, MarginMethod, SAMPLED_MARGIN_POINTS};
pub use heads::{maxpool_to_relu, sigmoid_head, sigmoid_slope};
pub use indicators::{
    complex_indicator, cuboid_hole_indicator, difference_indicator, union_indicator,
    AGGREGATE_SLOPE,
};
pub use lipschitz::{lipschitz_approximator, LipschitzPlan, MAX_CUBES};

use serde::Serialize;

use crate::network::Network;

/// A synthesized network together with the certificates of its gates.
#[derive(Debug, Clone)]
pub struct Build {
    pub network: Network,
    pub gates: Vec<GateCertificate>,
}

#[derive(Serialize)]
struct CertificateFile<'a> {
    gates: Vec<gate::CertificateEntry<'a>>,
}

impl Build {
    /// Certificate sidecar: `{"gates":[{"c":[..],"V":..,"m_hat":..,"M":..,"method":..}]}`.
    pub fn certificates_json(&self) -> String {
        let file = CertificateFile {
            gates: self.gates.iter().map(GateCertificate::entry).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("certificates serialize");
        s.push('\n');
        s
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<(), crate::error::ConstructError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(crate::error::ConstructError::InvalidEpsilon(eps))
    }
}
