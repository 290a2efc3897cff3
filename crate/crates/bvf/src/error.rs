//! Error taxonomy shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two curved or oblique boundaries overlap on a positive-measure set
    /// that cannot be expressed as shared facets.
    #[error("overlap not representable: {0}")]
    OverlapNotRepresentable(String),

    #[error("quadrature failure in {op}: {detail}")]
    Quadrature { op: &'static str, detail: String },

    /// Plancherel tail came out negative beyond rounding tolerance,
    /// which signals a misconfigured profile.
    #[error("negative tail energy {value:e} at R = {radius}")]
    NegativeTail { value: f64, radius: f64 },

    #[error("insufficient radial range: {0}")]
    InsufficientRange(String),

    #[error("degenerate dilation factor {0}")]
    DegenerateDilation(f64),

    #[error("witness not found: {0}")]
    WitnessNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn quadrature(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Quadrature {
            op,
            detail: detail.into(),
        }
    }
}
