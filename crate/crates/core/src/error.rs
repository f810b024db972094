use thiserror::Error;

/// Errors raised anywhere in the pipeline. Each variant carries a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular evaluation: {0}")]
    Singularity(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("near-field accuracy error: {0}")]
    NearField(String),
    #[error("source point lies on the measurement circle (distance {distance:e} from it)")]
    SourceOnCircle { distance: f64 },
    #[error(
        "linear system nearly singular (condition estimate {condition:.3e}) at k = {k}; \
         this is likely a spurious interior resonance of the single-layer ansatz, perturb k slightly"
    )]
    Resonance { condition: f64, k: f64 },
    #[error("solver error: {0}")]
    Solver(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("reconstruction failure: {0}")]
    Reconstruction(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::Singularity(_) => "SINGULARITY",
            Error::Resolution(_) => "RESOLUTION",
            Error::NearField(_) => "NEAR_FIELD",
            Error::SourceOnCircle { .. } => "TRACE_SOURCE_ON_CIRCLE",
            Error::Resonance { .. } => "RESONANCE",
            Error::Solver(_) => "SOLVER",
            Error::Fit(_) => "FIT",
            Error::Reconstruction(_) => "RECONSTRUCTION",
        }
    }

    /// Same error with `ctx` prefixed to its message; structured variants are kept as they are.
    pub fn context(self, ctx: &str) -> Error {
        match self {
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Singularity(m) => Error::Singularity(format!("{ctx}: {m}")),
            Error::Resolution(m) => Error::Resolution(format!("{ctx}: {m}")),
            Error::NearField(m) => Error::NearField(format!("{ctx}: {m}")),
            Error::Solver(m) => Error::Solver(format!("{ctx}: {m}")),
            Error::Fit(m) => Error::Fit(format!("{ctx}: {m}")),
            Error::Reconstruction(m) => Error::Reconstruction(format!("{ctx}: {m}")),
            e @ (Error::SourceOnCircle { .. } | Error::Resonance { .. }) => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
