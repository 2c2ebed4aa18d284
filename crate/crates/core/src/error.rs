use thiserror::Error;

/// Every failure the library reports. [`Error::code`] is the stable
/// machine-readable tag used in CLI error objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid twisted family: {0}")]
    InvalidFamily(String),
    #[error("not a cochain complex: {0}")]
    NotAComplex(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("truncated tower did not stabilise by depth {cap}")]
    NoStabilization { cap: usize },
    #[error("spectral point {z} lies on the strip wall Re z = {wall}")]
    BoundaryHit { z: String, wall: f64 },
    #[error("complex is not acyclic: H^{degree} has dimension {dim}")]
    NotAcyclic { degree: usize, dim: usize },
    #[error("map is not a cycle in the Hom complex: {0}")]
    NotACycle(String),
    #[error("{0} is not a spectral point")]
    NotSpectral(String),
    #[error("deck map is not a chain map: {0}")]
    NotAChainMap(String),
    #[error("deck map is not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid Seifert matrix: {0}")]
    InvalidSeifert(String),
    #[error("omega = 1 is excluded")]
    OmegaOne,
    #[error("jump point: {0}")]
    JumpPoint(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("operator family is identically singular: {0}")]
    IdenticallySingular(String),
    #[error("spectral point on the unit circle at an endpoint: {0}")]
    EndpointSpectral(String),
    #[error("no excluded radius found: {0}")]
    NoExcludedRadius(String),
    #[error("tangential crossing: {0}")]
    TangentialCrossing(String),
    #[error("numeric and exact computations disagree: {0}")]
    Mismatch(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "PARSE",
            Error::Shape(_) => "SHAPE_MISMATCH",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::ZeroPolynomial => "ZERO_POLYNOMIAL",
            Error::InvalidFamily(_) => "INVALID_FAMILY",
            Error::NotAComplex(_) => "NOT_A_COMPLEX",
            Error::DegenerateFamily(_) => "DEGENERATE_FAMILY",
            Error::NoStabilization { .. } => "NO_STABILIZATION",
            Error::BoundaryHit { .. } => "BOUNDARY_HIT",
            Error::NotAcyclic { .. } => "NOT_ACYCLIC",
            Error::NotACycle(_) => "NOT_A_CYCLE",
            Error::NotSpectral(_) => "NOT_SPECTRAL",
            Error::NotAChainMap(_) => "NOT_A_CHAIN_MAP",
            Error::NotInvertible(_) => "NOT_INVERTIBLE",
            Error::InvalidSeifert(_) => "INVALID_SEIFERT",
            Error::OmegaOne => "OMEGA_ONE",
            Error::JumpPoint(_) => "JUMP_POINT",
            Error::OutOfRange(_) => "OUT_OF_RANGE",
            Error::IdenticallySingular(_) => "IDENTICALLY_SINGULAR",
            Error::EndpointSpectral(_) => "ENDPOINT_SPECTRAL",
            Error::NoExcludedRadius(_) => "NO_EXCLUDED_RADIUS",
            Error::TangentialCrossing(_) => "TANGENTIAL_CROSSING",
            Error::Mismatch(_) => "MISMATCH",
        }
    }

    /// Input that could not be read at all, as opposed to a mathematical
    /// obstruction.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
