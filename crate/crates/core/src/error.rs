use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed image: {0}")]
    MalformedImage(String),

    #[error("unsupported image format: {0}")]
    UnsupportedImage(String),

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("region {rect} does not fit inside a {width}x{height} raster")]
    OutOfBounds {
        rect: String,
        width: usize,
        height: usize,
    },

    #[error("raster contains no occupied pixels")]
    EmptyRaster,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("not enough points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("degenerate regression: all x values are equal")]
    DegenerateX,

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("optimisation failed: {0}")]
    Optimisation(String),

    #[error("zero average curvature in period {0}")]
    ZeroCurvature(usize),

    #[error("mismatched ratio indices: {0:?} vs {1:?}")]
    MismatchedIndices(Vec<usize>, Vec<usize>),
}
