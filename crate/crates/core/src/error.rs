use thiserror::Error;

/// Errors raised by geometry, sampling and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("tangent vectors are based at different points")]
    BaseMismatch,
    #[error("point is off the manifold (residual {residual:e})")]
    OffManifold { residual: f64 },
    #[error("vector is not tangent at its base point (residual {residual:e})")]
    NotTangent { residual: f64 },
    #[error("geodesic length {length} exceeds the integration horizon {horizon}")]
    HorizonExceeded { length: f64, horizon: f64 },
    #[error("geodesic left the chart at u = {u}")]
    ChartExit { u: f64 },
    #[error("profile queried at u = {u}, outside [{min}, {max}]")]
    ProfileDomain { u: f64, min: f64, max: f64 },
    #[error("points are at or beyond the injectivity radius (distance {distance}, bound {bound})")]
    BeyondInjectivity { distance: f64, bound: f64 },
    #[error("geodesic shooting did not converge after {iterations} iterations (residual {residual:e})")]
    ShootingFailed { iterations: usize, residual: f64 },
    #[error("integration step {step} is too coarse: error estimate {estimate:e} exceeds {tolerance:e}")]
    StepTooCoarse { step: f64, estimate: f64, tolerance: f64 },
    #[error("curve needs at least two samples")]
    EmptyCurve,
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires a two-dimensional or constant-curvature model")]
    UnsupportedModel,
    #[error("no certified injectivity radius for a numeric model")]
    MissingCertifiedInjectivity,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("nesting violated at sequence index {index} (excess {excess:e})")]
    NestingViolated { index: usize, excess: f64 },
    #[error("intersection is a single tangency point")]
    Tangency,
    #[error("intersection sample is empty although the balls should overlap (integration defect)")]
    EmptyIntersection,
    #[error("diameter ascent left the admissible region (margin {margin:e})")]
    AscentLeftRegion { margin: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GeoError {
    fn from(e: std::io::Error) -> Self {
        GeoError::Io(e.to_string())
    }
}

impl From<csv::Error> for GeoError {
    fn from(e: csv::Error) -> Self {
        GeoError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
