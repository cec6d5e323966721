use thiserror::Error;

/// Errors raised by the numerical pipeline and the configuration layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid cannot resolve q = {q:.4} (needs {needed:.1} nodes per period, has {available:.1})")]
    Resolution { q: f64, needed: f64, available: f64 },

    #[error("integral did not converge: {0}")]
    NonConvergence(String),

    #[error("azimuthal window |l - m| <= {window} discards {discarded:.3e} of the power")]
    WindowTruncation { window: usize, discarded: f64 },

    #[error("radial grid too small: {0}")]
    GridExtent(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("value {value} outside the computed range [{min}, {max}] for {what}")]
    Extrapolation {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("Cartesian grid violates the band limit: {0}")]
    BandLimit(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image output failed: {0}")]
    Image(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Io(_) | Error::Image(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
