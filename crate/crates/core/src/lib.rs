//! Construction and exact certification of subsets of R^d that avoid an
//! unbounded sequence of distances while keeping prescribed density at the
//! avoided scales.
//!
//! The library builds staged unions of thickened lattice cubes ("blocks"),
//! certifies every inequality the construction relies on with exact rational
//! arithmetic, and provides randomized estimators as independent evidence.
//! Nothing in a certificate ever depends on floating point: radii and
//! distances are rationals or square roots of rationals, compared exactly.

pub mod builder;
pub mod certify;
pub mod enclose;
pub mod exact;
pub mod factor;
pub mod lattice;
pub mod manifest;
pub mod norms;
pub mod oracle;
pub mod render;
pub mod scalar;
pub mod spectrum;

/// Exact rational scalar used throughout certified computations.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// A point with exact rational coordinates.
pub type Point = Vec<Rat>;

pub use builder::{build, threshold, Budgets, ConstructionManifest, FSpec, Stage};
pub use certify::{certify_manifest, CertReport, VerifyDepth};
pub use exact::ScaleValue;
pub use norms::{EquivalenceConstants, NormSpec, VolumeEstimate};
pub use oracle::SamplerConfig;
pub use spectrum::{GapCertificate, SpectrumWindow};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("norm kind does not support exact evaluation ({0}); certification is unavailable")]
    NotExact(String),
    #[error("polytope functionals do not span R^d (rank < d)")]
    DegeneratePolytope,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("factorization budget exceeded for {0}")]
    FactorBudget(String),
    #[error("decay threshold unreachable: {0}")]
    ThresholdUnreachable(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("stage {0} does not exist")]
    StageNotFound(usize),
    #[error("density requirement unsatisfiable: {0}")]
    DensityUnsatisfiable(String),
    #[error("manifest parse error: {0}")]
    Parse(String),
    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),
    #[error("sampling rejection budget exceeded")]
    RejectionBudget,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
