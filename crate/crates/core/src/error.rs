use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid quadrature size Q={q}: {reason}")]
    Quadrature { q: usize, reason: String },

    #[error("Hermite recurrence left the floating-point range at k={k}, node j={j} (x={x})")]
    BasisRange { k: usize, j: usize, x: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is not a power of two")]
    NotDyadic(u64),

    #[error("box too small: boundary magnitude {measured:e} relative to peak exceeds {tolerance:e}")]
    BoxTooSmall { measured: f64, tolerance: f64 },

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("nonlinear grid too small: Q_nl={got}, need at least {required}")]
    GridTooSmall { got: usize, required: usize },

    #[error("invalid evolution config: {0}")]
    Config(String),

    #[error("non-finite value encountered; last valid stamp t={last_valid_t}")]
    NonFinite { last_valid_t: f64 },

    #[error("unsupported order {0} (supported: {1})")]
    UnsupportedOrder(usize, &'static str),

    #[error("not enough samples: have {have}, need {need}")]
    TooFewSamples { have: usize, need: usize },

    #[error("stamps are not uniformly spaced (index {0})")]
    NonUniformStamps(usize),

    #[error("block N={n} is not resolvable at n_max={n_max}; largest resolvable N is {max_resolvable}")]
    Unresolvable { n: u64, n_max: usize, max_resolvable: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("denominator {0:e} underflows (point too far in the Gaussian tail)")]
    Underflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
