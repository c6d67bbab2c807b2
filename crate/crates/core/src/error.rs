use thiserror::Error;

use crate::grid::Field;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("non-finite value {value} at node {index}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("incompatible fields: {0}")]
    IncompatibleFields(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular flux: zero gradient on cell {cell} with p < 2 and eps_reg = 0")]
    SingularFlux { cell: usize },

    #[error("singular direction: the linearization needs a nonzero vector")]
    SingularDirection,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    ConvergenceFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
        /// Last iterate of the failed method, when there is a field to report.
        last: Option<Box<Field>>,
    },

    #[error("bracketing failure: {0}")]
    BracketingFailure(String),

    #[error("minimization converged to the trivial solution (sup-norm {sup:.3e}); lambda is likely at most lambda1")]
    TrivialSolution { sup: f64 },

    #[error("implicit step failed at time index {time_index} (residual {residual:.3e} after {iterations} Newton iterations)")]
    StepFailure {
        time_index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("scenario `{scenario}` needs n >= {min_n} (got {n})")]
    Preflight {
        scenario: String,
        n: usize,
        min_n: usize,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SingularFlux { .. }
                | Error::ConvergenceFailure { .. }
                | Error::BracketingFailure(_)
                | Error::TrivialSolution { .. }
                | Error::StepFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
