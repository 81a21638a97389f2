use std::path::PathBuf;

/// Errors produced anywhere in the synthesis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Earth/orbit geometry has no solution (e.g. target beyond the horizon).
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error(
        "target ({lat_deg}°, {lon_deg}°) is not visible: off-nadir angle {off_nadir_deg:.3}° exceeds field of view {fov_deg:.3}°"
    )]
    NotVisible {
        lat_deg: f64,
        lon_deg: f64,
        off_nadir_deg: f64,
        fov_deg: f64,
    },

    /// A caller broke an operation's precondition (mismatched dimensions, no
    /// active chains, zero-valued targets).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A beam metric could not be measured from the sampled cut.
    #[error("metric error: {0}")]
    Metric(String),

    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
