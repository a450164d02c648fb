use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integration fault at t = {t}: non-finite derivative")]
    IntegrationFault { t: f64 },
    #[error("incomplete assignment: variable {0} has no value")]
    IncompleteAssignment(usize),
    #[error("synthesis failure: {reason} (best margin {best_margin:.3e})")]
    SynthesisFailure { reason: String, best_margin: f64 },
    #[error("THD undefined: zero fundamental amplitude")]
    UndefinedThd,
    #[error("model fault: {0}")]
    ModelFault(String),
    #[error("dc-link collapse at t = {t:.6} s (v_dc = {v_dc:.2} V)")]
    DcCollapse { t: f64, v_dc: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
