use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("{profile} evaluated outside its domain at t = {t}")]
    Domain { profile: &'static str, t: f64 },
    #[error("invalid profile constants: {0}")]
    Constants(String),
    #[error("could not place the cutoff knot of g below {limit}")]
    KnotSearch { limit: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("step size underflow (h = {h:e}) at t = {t} near {state:?}")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudget { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("orbit drifted {distance:e} off the torus (limit {limit:e}) at t = {t}")]
    TorusDrift { t: f64, distance: f64, limit: f64 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}
