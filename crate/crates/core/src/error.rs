use thiserror::Error;

/// Errors raised by the library. Every message names the module that
/// produced it so front ends can forward it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model: invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("spectrum: block N={n} is degenerate (|Omega_1N| = {omega1:e} below 1e-14)")]
    DegenerateBlock { n: u64, omega1: f64 },

    #[error("dynamics: alpha^2 = {alpha2} is below beta^2 = {beta2}; the overlap series base is negative")]
    NegativeBase { alpha2: f64, beta2: f64 },

    #[error("model: Bell state {state} belongs to the {expected} channel but a = {a}")]
    ChannelMismatch { state: &'static str, expected: &'static str, a: f64 },

    #[error("revival: {reason}")]
    DegenerateNeighborhood { reason: String },

    #[error("revival: |c1| = {c1:e} is below 1e-14, no revival")]
    NoRevival { c1: f64 },

    #[error("revival: Poisson sum over |k| <= {kmax} drops a Gaussian tail of {tail:e} at tau = {tau}")]
    TruncatedPoissonSum { kmax: u32, tau: f64, tail: f64 },

    #[error("oracle: truncation at ncut={ncut} is too small: {reason}")]
    TruncationRisk { ncut: usize, reason: String },

    #[error("search: the search space is empty ({reason})")]
    EmptySearchSpace { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}
