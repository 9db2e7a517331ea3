use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration has {found} sites, expected {expected}")]
    SiteCountMismatch { expected: usize, found: usize },

    #[error("operation requires N = {required}, got N = {found}")]
    UnsupportedSiteCount { required: &'static str, found: usize },

    #[error("vanishing denominator in {context} (theta = {theta}, hop = {hop}, k = {momentum})")]
    SingularDenominator {
        context: &'static str,
        theta: f64,
        hop: f64,
        momentum: f64,
    },

    #[error("theta = {theta} lies outside the {window} window [{lower}, {upper}]")]
    OutsideWindow {
        window: &'static str,
        theta: f64,
        lower: f64,
        upper: f64,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e}, last iterate {last:?})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("winding undefined: spin vector at site {site} vanishes")]
    UndefinedWinding { site: usize },

    #[error("winding ambiguous: spins at sites {site} and {next} are antiparallel")]
    AmbiguousWinding { site: usize, next: usize },

    #[error("eigenvalue {value} has no partner of opposite sign")]
    PairingFailure { value: String },

    #[error("fit needs at least {required} points, got {found}")]
    InsufficientPoints { required: usize, found: usize },

    #[error("theta = {theta} is within {margin} of the first-order boundary {boundary}")]
    NearFirstOrderBoundary {
        theta: f64,
        boundary: f64,
        margin: f64,
    },

    #[error("solver failed at g1 = {g1}: {reason}")]
    SolverFailure { g1: f64, reason: String },
}
