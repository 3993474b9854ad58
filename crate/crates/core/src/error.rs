use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} did not converge after {iterations} iterations (achieved {achieved:.3e}, target {target:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        achieved: f64,
        target: f64,
    },

    #[error("monotone iteration left the bracket at node ({i}, {j}) on sweep {sweep}: {detail}")]
    BracketViolation {
        i: i64,
        j: i64,
        sweep: usize,
        detail: String,
    },

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("constraint gradient vanished at iteration {0}")]
    DegenerateConstraint(usize),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}
