use alloc::string::String;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("relations are not contained in generators")]
    RelationsNotContained,
    #[error("submodule is not contained in the module: {0}")]
    NotContained(String),
    #[error("morphism is not well defined: {0}")]
    NotWellDefined(String),
    #[error("filtration is not monotone at index {0}")]
    FiltrationNotMonotone(i64),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("morphism does not respect filtrations: {0}")]
    NotFiltered(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("ring is not a field")]
    NotAField,
    #[error("operation not supported over this ring: {0}")]
    UnsupportedRing(String),
    #[error("filtration is not separated (nonzero floor)")]
    NotSeparated,
    #[error("requested degree {requested} lies outside the resolved range (horizon {horizon})")]
    DepthTooSmall { requested: i64, horizon: i64 },
    #[error("nilpotency verification failed: {0}")]
    NilpotencyVerificationFailed(String),
    #[error("search budget exceeded ({0} subspaces)")]
    SearchBudgetExceeded(usize),
    #[error("assembly identity violated: {0}")]
    AssemblyIdentityViolated(String),
    #[error("monodromy T is not available in direct mode")]
    TNotAvailable,
    #[error("basis match failed: {0}")]
    BasisMatchFailed(String),
    #[error("degree {0} is not a unit")]
    DegreeNotUnit(String),
    #[error("module is not termwise free: {0}")]
    NotTermwiseFree(String),
    #[error("ill-defined page differential at {0}")]
    IllDefinedDifferential(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
