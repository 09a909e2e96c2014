use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid randomizer: {0}")]
    InvalidRandomizer(&'static str),

    #[error("raw moment of order {order} is not finite for this randomizer")]
    MomentNotFinite { order: usize },

    #[error("quadrature size {requested} outside 1..={max}")]
    InvalidNodeCount { requested: usize, max: usize },

    #[error(
        "Gram matrix is not numerically positive definite for N={nodes}; \
         N is too large for this randomizer's conditioning"
    )]
    IllConditioned { nodes: usize },

    #[error("tridiagonal eigenvalue iteration did not converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(&'static str),

    #[error("time {t} lies outside the curve range [0, {last}]")]
    OutsideCurve { t: f64, last: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("invalid swaption: {0}")]
    InvalidSwaption(&'static str),

    #[error(
        "could not bracket the Jamshidian root on [{low}, {high}]: \
         residuals {low_residual:e} and {high_residual:e} share a sign"
    )]
    RootNotBracketed {
        low: f64,
        high: f64,
        low_residual: f64,
        high_residual: f64,
    },

    #[error("root search stopped after {iterations} iterations at x={x}, residual {residual:e}")]
    RootNoConvergence {
        iterations: usize,
        x: f64,
        residual: f64,
    },

    #[error("quadrature node {node} gives non-positive volatility {value}")]
    NonPositiveVolatility { node: usize, value: f64 },

    #[error("at quadrature node {node}: {source}")]
    AtNode { node: usize, source: Box<Error> },

    #[error("density of the short rate is a point mass at t = 0")]
    DegenerateHorizon,

    #[error("mixture density underflows at y = {y}")]
    DensityUnderflow { y: f64 },

    #[error("price {price:e} outside the no-arbitrage band [{lower:e}, {upper:e})")]
    PriceOutsideBand { price: f64, lower: f64, upper: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { got: usize, needed: usize },

    #[error("quote set is empty")]
    EmptyQuotes,

    #[error("invalid quote: {0}")]
    InvalidQuote(&'static str),

    #[error("calibration failed: every start was penalized (best objective {best_objective})")]
    CalibrationFailed { best_objective: f64 },
}

impl Error {
    /// Stable snake-case name of the variant, for machine-readable reports.
    /// Node context is looked through.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidRandomizer(_) => "invalid_randomizer",
            Error::MomentNotFinite { .. } => "moment_not_finite",
            Error::InvalidNodeCount { .. } => "invalid_node_count",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::EigenNoConvergence { .. } => "eigen_no_convergence",
            Error::InvalidCurve(_) => "invalid_curve",
            Error::OutsideCurve { .. } => "outside_curve",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidSwaption(_) => "invalid_swaption",
            Error::RootNotBracketed { .. } => "root_not_bracketed",
            Error::RootNoConvergence { .. } => "root_no_convergence",
            Error::NonPositiveVolatility { .. } => "non_positive_volatility",
            Error::AtNode { source, .. } => source.kind(),
            Error::DegenerateHorizon => "degenerate_horizon",
            Error::DensityUnderflow { .. } => "density_underflow",
            Error::PriceOutsideBand { .. } => "price_outside_band",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::EmptyQuotes => "empty_quotes",
            Error::InvalidQuote(_) => "invalid_quote",
            Error::CalibrationFailed { .. } => "calibration_failed",
        }
    }

    pub(crate) fn at_node(node: usize, source: Error) -> Error {
        match source {
            e @ Error::AtNode { .. } => e,
            e @ Error::NonPositiveVolatility { .. } => e,
            e => Error::AtNode {
                node,
                source: Box::new(e),
            },
        }
    }
}
