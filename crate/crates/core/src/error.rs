use std::path::PathBuf;

/// Errors produced anywhere in the mapping and detection pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("query point ({x:.3}, {y:.3}) lies outside the terrain extent")]
    OutOfExtent { x: f64, y: f64 },

    #[error(
        "rock placement reached coverage {achieved:.4} of the requested {requested:.4} \
         after {attempts} attempts"
    )]
    Placement {
        achieved: f64,
        requested: f64,
        attempts: usize,
    },

    #[error("camera at ({x:.3}, {y:.3}, {z:.3}) is not above the terrain surface")]
    CameraBelowSurface { x: f64, y: f64, z: f64 },

    #[error("layer {layer} outside 1..={depth}")]
    LayerOutOfRange { layer: usize, depth: usize },

    #[error("non-positive camera height above measurement ({0:.6} m)")]
    Footprint(f64),

    #[error("invalid measurement variance inputs: {0}")]
    Variance(&'static str),

    #[error("Kalman update needs positive variances, got prior {prior} and measurement {measurement}")]
    NonPositiveVariance { prior: f64, measurement: f64 },

    #[error("point ({x:.3}, {y:.3}) lies outside the map")]
    OutsideMap { x: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
