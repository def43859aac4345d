use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("lattice is not mirror-closed: {0}")]
    NotMirrorClosed(String),
    #[error("domain mask is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("domain mask is empty at this resolution")]
    EmptyMask,
    #[error("invalid domain description: {0}")]
    InvalidDomain(String),
    #[error("polarization offset a = {a} is not lattice-aligned (2a must be a multiple of h)")]
    UnalignedPlane { a: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("function is not sign-changing")]
    NotSignChanging,
    #[error("zero L^q mass in one sign part")]
    ZeroMass,
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),
    #[error("u is negative near the boundary; apply the sign-flip reduction (v = -u)")]
    SignFlipRequired,
    #[error("boundary point has no outward normal (corner)")]
    Corner,
    #[error("no domain descriptor attached to this grid")]
    NoDescriptor,
    #[error("support escape at offset a = {a}: node {node} leaves the closed domain")]
    SupportEscape { a: f64, node: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("missing configuration key `{0}`")]
    MissingKey(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
