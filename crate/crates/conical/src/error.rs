use num_complex::Complex64;
use thiserror::Error;

/// Every failure mode of the library. `name()` gives the stable identifier
/// printed by the CLI.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    PoleOfGamma(String),
    #[error("|z| = {0} is outside the unit disk")]
    OutsideConvergenceDisk(f64),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("endpoint singularity too strong: {0}")]
    SingularityTooStrong(String),
    #[error("integrand does not decay: {0}")]
    NonDecayingIntegrand(String),
    #[error("band limit violated: |R_{n}| = {value:e} (max {max:e})")]
    BandViolation { n: i64, value: f64, max: f64 },
    #[error("series truncated with estimated error {estimate:e}")]
    TruncationWarning { value: Complex64, estimate: f64 },
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),
    #[error("recurrence pole at tau^2 = -{0}")]
    RecurrencePole(f64),
    #[error("evaluation at a pole: {0}")]
    PoleHit(String),
    #[error("outside the admissible region: {0}")]
    RegionViolation(String),
    #[error("tail too large: {0}")]
    TailTooLarge(String),
    #[error("cos(K pi) vanishes for K = {0}")]
    HalfIntegerOrder(f64),
    #[error("zero frequency")]
    ZeroFrequency,
    #[error("no dominant frequency: {0}")]
    NotDominant(String),
    #[error("weighted sum does not converge: {0}")]
    NonConvergentWeighted(String),
    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::PoleOfGamma(_) => "PoleOfGamma",
            Error::OutsideConvergenceDisk(_) => "OutsideConvergenceDisk",
            Error::NonConvergence(_) => "NonConvergence",
            Error::SingularityTooStrong(_) => "SingularityTooStrong",
            Error::NonDecayingIntegrand(_) => "NonDecayingIntegrand",
            Error::BandViolation { .. } => "BandViolation",
            Error::TruncationWarning { .. } => "TruncationWarning",
            Error::UnsupportedOrder(_) => "UnsupportedOrder",
            Error::RecurrencePole(_) => "RecurrencePole",
            Error::PoleHit(_) => "PoleHit",
            Error::RegionViolation(_) => "RegionViolation",
            Error::TailTooLarge(_) => "TailTooLarge",
            Error::HalfIntegerOrder(_) => "HalfIntegerOrder",
            Error::ZeroFrequency => "ZeroFrequency",
            Error::NotDominant(_) => "NotDominant",
            Error::NonConvergentWeighted(_) => "NonConvergentWeighted",
            Error::UnsupportedWeight(_) => "UnsupportedWeight",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
