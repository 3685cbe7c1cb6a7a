use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole at s = 1 (|s - 1| = {0:e})")]
    PoleAtOne(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("multiplicity polynomial of degree {0} not supported (max 3)")]
    DegreeTooHigh(usize),
    #[error("analytic continuation unavailable for truncated explicit spectrum at Re(s) = {0}")]
    ContinuationUnavailable(f64),
    #[error("no sign change bracketing root {index} (lambda = {lambda}, r = {r})")]
    BracketFailure { index: usize, lambda: f64, r: f64 },
    #[error("root sequence has {got} roots, need at least {need}")]
    InsufficientRoots { got: usize, need: usize },
    #[error("tail fit failed: {0}")]
    TailFitFailure(String),
    #[error("invalid mode problem: {0}")]
    InvalidProblem(String),
    #[error("unsupported boundary configuration: {0}")]
    UnsupportedBoundary(String),
    #[error("mode sum did not converge: {0}")]
    Convergence(String),
    #[error("Ker B is nontrivial (dim {0}); operation requires an invertible tangential operator")]
    KernelPresent(usize),
    #[error("kernel mode (lambda = 0) has no Dirichlet-to-Neumann formula")]
    KernelMode,
    #[error("invalid cap operator: {0}")]
    InvalidCap(String),
    #[error("lambda^2 + z lies on the branch cut (z = {0})")]
    Branch(String),
    #[error("insufficient decay of the subtracted series: {0}")]
    InsufficientDecay(String),
    #[error("ill-conditioned fit (condition number {0:e})")]
    IllConditionedFit(f64),
    #[error("invalid fit input: {0}")]
    InvalidFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
