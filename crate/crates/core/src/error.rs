use alloc::string::String;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a supported power of two")]
    InvalidDimension(usize),
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("observable does not square to the identity (max deviation {deviation:e})")]
    NotDichotomic { deviation: f64 },
    #[error("expectation value has imaginary residue {residue:e}")]
    ComplexExpectation { residue: f64 },
    #[error("unknown preparation `{0}`")]
    UnknownPreparation(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("expected {expected} outcome probabilities, found {found}")]
    OutcomeCount { expected: usize, found: usize },
    #[error("quantum overlap {0} must lie in (0, 1]")]
    InvalidOverlap(f64),
    #[error("pair has quantum overlap {overlap}, expected 1/2")]
    PairOverlapMismatch { overlap: f64 },
    #[error("invalid toy model: {0}")]
    InvalidToyModel(&'static str),
    #[error("orthogonal pair: Ω undefined")]
    OrthogonalPair,
    #[error("degenerate grid {polar}×{azimuthal}: both step counts must be at least 8")]
    DegenerateGrid { polar: usize, azimuthal: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid budget scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("quantum overlap is zero: the Mermin budget does not depend on Ω")]
    ZeroQuantumOverlap,
    #[error("nonlocal tag {0} has no assigned Mermin value")]
    UnassignedNonlocal(usize),
    #[error("Mermin value {0} for a nonlocal tag lies outside [-4, 4]")]
    AssignmentOutOfRange(f64),
    #[error("machine dynamics violate Γ on {0} input(s)")]
    GammaViolated(usize),
    #[error("invalid linear program: {0}")]
    InvalidProgram(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
