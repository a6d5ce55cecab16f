use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy { achieved: f64, requested: f64 },

    /// The RF closed form needs `x_i^-PL > sigma^2` at every Chebyshev node.
    #[error(
        "RF CSI error variance {sigma_sq:e} is not below the path gain {path_gain:e} \
         at Chebyshev node {node} (distance {distance:.4} m)"
    )]
    ChebyshevNode {
        node: usize,
        distance: f64,
        path_gain: f64,
        sigma_sq: f64,
    },

    #[error("config error for key `{key}`{}: {msg}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        msg: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[cfg(feature = "cli")]
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// Process exit code: 2 for accuracy/convergence failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Accuracy { .. } => 2,
            _ => 1,
        }
    }
}
