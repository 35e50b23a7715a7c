use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain (negative length, a ≥ 1, …).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A combination of inputs is inconsistent (mismatched parameterizations,
    /// step size too coarse for the requested delay, …).
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested evaluation point is a mathematical singularity.
    #[error("domain error: {0}")]
    Domain(String),

    /// The surface-mode pole ε₁ + ε₂ = 0, where the image factor diverges.
    #[error("surface-mode pole: eps1 + eps2 = 0 has no finite image dipole")]
    SurfacePole,

    /// A fit or measurement did not have enough samples to say anything.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The operation is not implemented for the requested configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An error from a named sub-step of a composite computation.
    #[error("{field}: {source}")]
    Attributed {
        field: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the name of the report field or sub-step it came from.
    pub fn attribute(self, field: &str) -> Error {
        Error::Attributed {
            field: field.to_string(),
            source: Box::new(self),
        }
    }
}
