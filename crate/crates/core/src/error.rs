use thiserror::Error;

/// Every failure the laboratory can report.
///
/// Numeric failures are never swallowed: an evaluation either meets the
/// requested precision or returns one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1")]
    PoleAtOne,
    #[error("precision unreachable: {0}")]
    PrecisionUnreachable(String),
    #[error("adaptive step collapsed below {min_step:e} near {location}")]
    StepCollapse { min_step: f64, location: String },
    #[error("zero count reconciliation failed at t = {t}: counted {counted}, formula gives {formula:.6}")]
    ReconciliationFailure { t: f64, counted: f64, formula: f64 },
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),
    #[error("sieve table too small: need {needed}, have {limit}")]
    TableTooSmall { needed: u64, limit: u64 },
    #[error("prime window is empty: ({lower:.4}, {upper:.4}]")]
    WindowEmpty { lower: f64, upper: f64 },
    #[error("support enumeration exceeded cap of {cap} elements")]
    SupportCapExceeded { cap: usize },
    #[error("f(p) denominator is not positive for p = {prime}")]
    NonpositiveWeight { prime: u64 },
    #[error("N = {n} is too small for log log log N > 0")]
    ScaleTooSmall { n: u64 },
    #[error("moment tail not certified: {0}")]
    TailNotCertified(String),
    #[error("sign {sign} is not admissible for n = {n} ({context})")]
    InvalidSign { n: u32, sign: i32, context: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Configuration problems are distinguished from numeric failures by the CLI exit code.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::InvalidSign { .. }
                | Error::ScaleTooSmall { .. }
                | Error::WindowEmpty { .. }
                | Error::NonpositiveWeight { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
