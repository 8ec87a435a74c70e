use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("infrared-singular evaluation at k = {k} (mu = {mu}); integrate instead of evaluating pointwise")]
    InfraredSingular { k: f64, mu: f64 },

    #[error("quadrature not converged: residual {residual:.3e} above tolerance {tol:.3e}")]
    QuadratureNotConverged { residual: f64, tol: f64 },

    #[error("non-integrable exponent: alpha = {alpha} must exceed -1")]
    NonIntegrableExponent { alpha: f64 },

    #[error("insufficient data: {found} points inside the fit window, need at least {needed}")]
    InsufficientData { found: usize, needed: usize },

    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    #[error("blow-up detected at mode node {node} (t = {t})")]
    BlowUp { node: usize, t: f64 },

    #[error("transient not settled: window averages differ by {rel_change:.3e} (tolerance {tol:.3e})")]
    TransientNotSettled { rel_change: f64, tol: f64 },

    #[error("dimension cap exceeded: basis would hold {dim} states, cap is {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("eigensolver restarts disagree: {first} vs {second}")]
    EigenRestartMismatch { first: f64, second: f64 },

    #[error("epsilon {eps:.3e} under-resolved: grid resolves denominators only down to {resolution:.3e}")]
    EpsilonUnderResolved { eps: f64, resolution: f64 },

    #[error("outside small-coupling regime: |g|·‖a h0‖ = {value:.4} ≥ 1/2")]
    OutsideSmallCoupling { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for failures caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_) | Error::InsufficientData { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
