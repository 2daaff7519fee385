//! Constructive synthesis of small-depth ReLU networks that realize
//! indicator functions of polytopal, simplicial and cuboid-with-holes sets.
//!
//! The crate is split into five layers:
//!
//! - [`geometry`]: half-space polytopes, simplices, simplicial complexes,
//!   cuboids with holes, membership/distance and shell classification.
//! - [`network`]: dense feed-forward networks with ReLU, sigmoid, identity and
//!   global max-pool activations, plus the versioned JSON file format.
//! - [`constructor`]: weight synthesis for polytope gates, unions,
//!   differences, simplicial complexes, Lipschitz approximators, and the
//!   closed-form width bounds.
//! - [`verifier`]: stratified pointwise checks and Monte-Carlo `L^p` errors.
//! - [`trainer`]: lattice datasets, initializers, full-batch gradient
//!   descent with hand-written reverse mode, and zero-line export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructor;
pub mod error;
pub mod geometry;
pub mod network;
pub mod rng;
pub mod trainer;
pub mod verifier;

pub use constructor::{
    betti_architecture, clipped_gate, complex_indicator, cuboid_hole_indicator,
    difference_indicator, lipschitz_approximator, maxpool_to_relu, polytope_gate, sigmoid_head,
    simplicial_width_bound, union_indicator, Build, GateCertificate, LipschitzPlan, MarginMethod,
};
pub use error::{ConstructError, Error, GeometryError, NetworkError, TrainError, VerifyError};
pub use geometry::{
    AxisBox, BettiProfile, ConvexPolytope, CuboidHoleSpace, DifferencePlan, DimensionHistogram,
    Hyperplane, ShellClass, Simplex, SimplicialComplex, Space,
};
pub use network::{Activation, Architecture, Layer, Matrix, Network};

/// Version string stamped into reports and manifests.
pub const TOOL_VERSION: &str = concat!("polynet ", env!("CARGO_PKG_VERSION"));
