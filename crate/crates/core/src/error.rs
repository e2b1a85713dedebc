use thiserror::Error;

/// Errors raised by every stage of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{value} lies outside [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("non-generic datum: |a(z)| = {modulus:.3e} at z = {z}")]
    NonGeneric { z: f64, modulus: f64 },

    #[error("eigenvalue count mismatch: winding number {winding}, refined roots {roots}")]
    EigenvalueCount { winding: i64, roots: usize },

    #[error("not an eigenvalue: proportionality residual {0:.3e}")]
    NotEigenvalue(f64),

    #[error("non-simple zero: |a'(z)| = {0:.3e}")]
    NonSimpleZero(f64),

    #[error("ill-conditioned RH system: residual {residual:.3e}, condition estimate {condition:.3e}")]
    IllConditioned { residual: f64, condition: f64 },

    #[error("accuracy: {0}")]
    Accuracy(String),

    #[error("degenerate Backlund transformation: vanishing denominator")]
    DegenerateBacklund,

    #[error("reflection coefficient vanishes at the stationary point z0 = {0}")]
    VanishingReflection(f64),

    #[error("unsupported parameter range: {0}")]
    UnsupportedRange(String),

    #[error("zeta = {0} lies on a ray of the model contour")]
    RayAmbiguity(num_complex::Complex64),

    #[error("stationary point z0 = {z0} is within {distance:.3e} of the eigenvalue")]
    StationaryCollision { z0: f64, distance: f64 },

    #[error("expected exactly one eigenvalue, found {0}")]
    Arity(usize),

    #[error("domain too small: edge magnitude {0:.3e} would wrap around")]
    DomainTooSmall(f64),

    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: u64, msg: String },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
