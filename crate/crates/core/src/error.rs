use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("hyperplane normal has zero length")]
    ZeroNormal,
    #[error("non-finite coordinate in geometry input")]
    NonFinite,
    #[error("polytope is unbounded along recession direction {direction:?}")]
    Unbounded { direction: Vec<f64> },
    #[error("degenerate polytope: {0}")]
    Degenerate(String),
    #[error("degenerate simplex: vertices are not affinely independent")]
    DegenerateSimplex,
    #[error("projection did not converge after {iterations} cycles (best distance {best}, residual {residual:e})")]
    NotConverged {
        best: f64,
        residual: f64,
        iterations: usize,
    },
    #[error("invalid simplicial complex: {0}")]
    InvalidComplex(String),
    #[error("invalid cuboid-hole space: {0}")]
    InvalidCuboid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("geometry spec: {0}")]
    Spec(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("input dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("layer {layer}: {message}")]
    Shape { layer: usize, message: String },
    #[error("non-finite value produced in layer {layer}")]
    NonFinite { layer: usize },
    #[error("malformed network file: {0}")]
    Format(String),
    #[error("unsupported network file version {0:?} (expected \"v1\")")]
    UnsupportedVersion(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("shell width must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("margin estimate {0} is not negative; the gate geometry is inconsistent")]
    NonNegativeMargin(f64),
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("network head not recognized: {0}")]
    HeadNotRecognized(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("function value {value} at anchor {anchor:?} is outside [0, 1]")]
    FunctionRange { anchor: Vec<f64>, value: f64 },
    #[error("resource limit: {0}")]
    Resource(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("could not populate the {stratum} stratum after {attempts} attempts")]
    EmptyStratum {
        stratum: &'static str,
        attempts: usize,
    },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no shell width down to 2^-30 keeps the shell measure below {target}")]
    NoTolerance { target: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize, curve: Vec<f64> },
}

/// Umbrella error for callers that drive several modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Train(#[from] TrainError),
}
