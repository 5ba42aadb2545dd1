//! Crate-wide error type.

/// Errors signalled by precondition violations and failed numerics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{p} and {q} are not coprime")]
    NotCoprime { p: i64, q: u64 },
    #[error("{a} is not invertible mod {m}")]
    NotInvertible { a: i64, m: u64 },
    #[error("denominator of a Jacobi symbol must be odd, got {0}")]
    EvenDenominator(i64),
    #[error("epsilon factor requires an odd argument, got {0}")]
    EvenArgument(i64),
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("modulus {q} must satisfy {requirement}")]
    BadModulus { q: u64, requirement: &'static str },
    #[error("sign class {sigma} is not valid for modulus {q}")]
    BadSignClass { sigma: &'static str, q: u64 },
    #[error("no residues p with gcd(p,q)=1 and p/q in D")]
    EmptyResidueRange,
    #[error("hermite order {0} exceeds the supported range (<= 300)")]
    HermiteOrderTooLarge(u32),
    #[error("series truncation too small: need {needed} terms, got {got}")]
    TruncationTooSmall { needed: u64, got: u64 },
    #[error("quadrature failed to converge: {0}")]
    QuadratureNotConverged(&'static str),
    #[error("matrix is not unimodular: det = {det}")]
    NotUnimodular { det: f64 },
    #[error("matrix is not in {group}")]
    NotInGroup { group: &'static str },
    #[error("point must lie in the upper half-plane (y > 0), got y = {y}")]
    NotInUpperHalfPlane { y: f64 },
    #[error("fundamental-domain reduction did not terminate")]
    ReductionDiverged,
    #[error("empty sample set")]
    EmptySamples,
    #[error("not enough samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("insufficient tail mass: {exceedances} exceedances at R = {r}")]
    InsufficientTailMass { exceedances: usize, r: f64 },
    #[error("missing class labels")]
    MissingLabels,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
