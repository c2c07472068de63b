use thiserror::Error;

/// Errors raised by the transforms, the group algebra and the file codecs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("size error: {0}")]
    Size(String),
    #[error("admissibility error: {0}")]
    Admissibility(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("stage error: {0}")]
    Stage(String),
    #[error("aliasing error: atom at s={s}, a={a} exceeds the image Nyquist band")]
    Aliasing { s: f64, a: f64 },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
