use thiserror::Error;

/// Failure modes shared across the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {s} outside curve domain [{min}, {max}]")]
    OutOfDomain { s: f64, min: f64, max: f64 },
    #[error("derivative of order {order} unavailable (max {max})")]
    DerivativeUnavailable { order: usize, max: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid parameter grid: {0}")]
    InvalidGrid(String),
    #[error(
        "geodesic degeneracy at s = {s}: second derivative is proportional to the null tangent"
    )]
    GeodesicDegeneracy { s: f64 },
    #[error("curve is not null at s = {s}: <a', a'> = {residual:e}")]
    NotNull { s: f64, residual: f64 },
    #[error("initial frame violates the null frame relations (max residual {residual:e})")]
    BadInitialFrame { residual: f64 },
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("integrator failure at t = {t}: {reason}")]
    IntegratorFailure { t: f64, reason: String },
    #[error("curvature vanishes at s = {s}")]
    KappaVanishes { s: f64 },
    #[error("curvature changes sign near s = {s}")]
    SignChange { s: f64 },
    #[error("torsion vanishes at s = {s}")]
    TauVanishes { s: f64 },
    #[error("variable transformation density is not positive at s = {s} (lambda = {lambda})")]
    NonPositiveLambda { s: f64, lambda: f64 },
    #[error("transformed parameter {s_a} leaves the source domain [{min}, {max}]")]
    DomainOverflow { s_a: f64, min: f64, max: f64 },
    #[error("anchor pair (s_a0, s_b0) required")]
    AnchorRequired,
    #[error("direction {0:?} is not a nonzero null vector")]
    NotNullDirection([f64; 3]),
}

impl Error {
    /// Variant name, used as a stable tag in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::DerivativeUnavailable { .. } => "DerivativeUnavailable",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::GeodesicDegeneracy { .. } => "GeodesicDegeneracy",
            Error::NotNull { .. } => "NotNull",
            Error::BadInitialFrame { .. } => "BadInitialFrame",
            Error::BadInput(_) => "BadInput",
            Error::IntegratorFailure { .. } => "IntegratorFailure",
            Error::KappaVanishes { .. } => "KappaVanishes",
            Error::SignChange { .. } => "SignChange",
            Error::TauVanishes { .. } => "TauVanishes",
            Error::NonPositiveLambda { .. } => "NonPositiveLambda",
            Error::DomainOverflow { .. } => "DomainOverflow",
            Error::AnchorRequired => "AnchorRequired",
            Error::NotNullDirection(_) => "NotNullDirection",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
