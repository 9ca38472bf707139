use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("conformal factor must be positive, got {value:e} at node {index} (r = {radius})")]
    NonpositiveFactor {
        index: usize,
        radius: f64,
        value: f64,
    },

    #[error(
        "boundary trace must be positive, got {value:e} at node {index} of component {component}"
    )]
    NonpositiveTrace {
        component: usize,
        index: usize,
        value: f64,
    },

    #[error("input {name} must be positive, got {value}")]
    NonpositiveInput { name: &'static str, value: f64 },

    #[error("boundary volume must be positive, got {value}")]
    BoundaryVolumeNotPositive { value: f64 },

    #[error("boundary norm of the test function vanishes")]
    VanishingBoundaryNorm,

    #[error(
        "grid order {actual} too low: analysis up to this degree requires order >= {required}"
    )]
    GridOrder { required: usize, actual: usize },

    #[error("metric must be scalar-flat for the harmonic reduction, max |R| = {max_abs:e}")]
    ScalarCurvatureNotFlat { max_abs: f64 },

    #[error("energy diverged below {energy:e}; the infimum may be -infinity")]
    Diverged { energy: f64 },

    #[error("no threshold found: energy comparison still fails at probe limit m = {probe_max:e}")]
    NoCrossing { probe_max: f64 },

    #[error("empty data set")]
    EmptyData,

    #[error("column {0:?} missing from CSV header")]
    MissingColumn(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
