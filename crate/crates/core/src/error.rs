use std::fmt;

/// Errors produced by graph construction, the dynamics kernels, and the
/// analytic oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented domain.
    InvalidParameter {
        name: &'static str,
        message: String,
    },
    /// Eigenvector centrality requested on a graph without edges.
    DegenerateGraph,
    /// Power iteration did not converge within the iteration budget.
    Convergence { residual: f64, iterations: usize },
    /// Coefficient of variation is undefined because the mean is (near) zero.
    UndefinedCv { mean: f64 },
    /// Two-state chain with gamma = beta = 0 has no unique stationary law.
    DegenerateChain,
    /// Fixed-point capital diverges because p'_p (1 - f_p - f_m) >= 1.
    NoStationaryCapital { product: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::DegenerateGraph => {
                write!(f, "degenerate graph: eigenvector centrality needs at least one edge")
            }
            Error::Convergence {
                residual,
                iterations,
            } => write!(
                f,
                "power iteration did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::UndefinedCv { mean } => {
                write!(f, "coefficient of variation undefined: mean {mean:e} is near zero")
            }
            Error::DegenerateChain => {
                write!(f, "degenerate chain: gamma and beta are both zero")
            }
            Error::NoStationaryCapital { product } => write!(
                f,
                "no stationary capital: p'_p (1 - f_p - f_m) = {product} >= 1"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
