use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("root finder hit the iteration cap of {cap}; last bracket [{lo}, {hi}]")]
    IterationCap { cap: usize, lo: f64, hi: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not an orthogonal projector (defect {defect:e})")]
    NotProjector { defect: f64 },

    #[error("eigenvalue {eigenvalue} lies within {tol:e} of an interval boundary")]
    BoundaryEigenvalue { eigenvalue: f64, tol: f64 },

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("bound violated for seed {seed}: measured {measured} exceeds bound {bound}")]
    BoundViolated {
        seed: u64,
        measured: f64,
        bound: f64,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            domain: domain.into(),
        }
    }

    /// True for errors caused by the caller's input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Invalid(_)
                | Error::NotSymmetric { .. }
                | Error::NotProjector { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
