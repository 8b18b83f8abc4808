use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A wavelet parameter is outside its admissible domain.
    #[error("parameter domain: {0}")]
    ParamDomain(String),

    /// The admissibility constant is not finite and positive.
    #[error("admissibility violated: {0}")]
    Admissibility(String),

    /// An argument is outside the domain of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A gamma-function evaluation left the representable range.
    #[error("range: {0}")]
    Range(String),

    /// An operation requires the uniqueness restriction of the structure
    /// equations (nu = c = 1).
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),

    /// Interval quadrature failed to converge during wavelet synthesis.
    #[error(
        "integration did not converge at t = {time} s on [{interval_lo}, {interval_hi}] rad/s \
         (disagreement {disagreement:.3e})"
    )]
    Integration {
        time: f64,
        interval_lo: f64,
        interval_hi: f64,
        disagreement: f64,
    },

    /// Wavelet bank and transform grid disagree on shape or axes.
    #[error("configuration: {0}")]
    Config(String),

    /// Malformed key-value configuration text.
    #[error("config parse: {0}")]
    ConfigParse(String),

    /// Invalid input signal (too short, missing maxima, ...).
    #[error("input: {0}")]
    Input(String),

    /// Grid has a degenerate shape.
    #[error("shape: {0}")]
    Shape(String),

    /// Causality score of an all-zero wavelet is undefined.
    #[error("undefined causality score: wavelet has zero energy")]
    UndefinedScore,

    /// Pearson correlation of a constant array is undefined.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// A WAV file violates the supported format (16-bit PCM mono).
    #[error("wav format: field `{field}`: {message}")]
    WavFormat { field: String, message: String },

    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short category tag used by the CLI error line.
    pub fn category(&self) -> &'static str {
        match self {
            Error::ParamDomain(_) => "param",
            Error::Admissibility(_) => "admissibility",
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::UnsupportedParams(_) => "unsupported",
            Error::Integration { .. } => "integration",
            Error::Config(_) => "config",
            Error::ConfigParse(_) => "config",
            Error::Input(_) => "input",
            Error::Shape(_) => "shape",
            Error::UndefinedScore => "score",
            Error::UndefinedCorrelation(_) => "correlation",
            Error::WavFormat { .. } => "format",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
