use thiserror::Error;

/// Errors raised by the geometry, function, measure and valuation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polyhedron is unbounded")]
    UnboundedPolyhedron,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("minimum of the pair is not convex (failed at {at:?})")]
    NotConvexMin { at: Vec<f64> },
    #[error("maximum of the pair is identically +inf")]
    IdenticallyInfiniteMax,
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("function is not exactly conjugable: {0}")]
    NotExactlyConjugable(String),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("regularization undefined: dom(u*) misses the ball of radius {radius}")]
    RegularizationUndefined { radius: f64 },
    #[error("operation requires an exact family, got {0}")]
    NotExactFamily(&'static str),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(&'static str),
    #[error("truncated measure is infinite: {0}")]
    UnboundedResult(String),
    #[error("Vandermonde system ill-conditioned (held-out residual {residual:e})")]
    IllConditioned { residual: f64 },
    #[error("Hessian has negative eigenvalue {eigenvalue:e}")]
    NonConvexHessian { eigenvalue: f64 },
    #[error("point is not on the subdifferential graph")]
    OffGraph,
    #[error("kernel support is not compact in {0}")]
    KernelNotCompact(&'static str),
    #[error("quadrature did not converge (relative error estimate {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },
    #[error("function is not coercive")]
    NotCoercive,
    #[error("neither epigraph meets the window")]
    BothInfiniteOnWindow,
    #[error("unsupported transform: {0}")]
    UnsupportedTransform(&'static str),
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
    #[error("non-convex input at {path}: {message}")]
    NonConvexInput { path: String, message: String },
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
