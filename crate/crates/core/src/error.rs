use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Endpoint signs of g(x) = psi(x) - x do not bracket a root.
    #[error("bracket error for k={k}, d={d}: g({left})={g_left:e}, g({right})={g_right:e}")]
    Bracket {
        k: u32,
        d: f64,
        left: f64,
        right: f64,
        g_left: f64,
        g_right: f64,
    },

    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { iterations: usize, what: String },

    #[error("no sign change of phi_star found in the degree window for k={k}")]
    NoRoot { k: u32 },

    #[error("product law support of {size} points exceeds the budget of {budget}")]
    SupportBlowUp { size: u128, budget: u128 },

    #[error("n*d = {n}*{d} is not divisible by k = {k}")]
    Divisibility { n: u64, k: u64, d: u64 },

    #[error("conditioning event has probability zero")]
    EmptyConditioning,

    #[error("n = {n} exceeds the exhaustive-enumeration cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("no simple instance after {retries} retries")]
    RetriesExhausted { retries: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown certificate id '{0}'")]
    UnknownCertificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::InvalidParameter(_)
                | Error::Divisibility { .. }
                | Error::SizeCap { .. }
                | Error::Parse { .. }
                | Error::InvalidInstance(_)
                | Error::UnknownCertificate(_)
        )
    }
}
