use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("assignment has length {got}, template arity is {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution has empty support")]
    EmptySupport,

    #[error("need n >= k (n = {n}, k = {k})")]
    TooFewVariables { n: usize, k: usize },

    #[error("{what}: size {size} exceeds the cap of {cap}{}", hint_suffix(.hint))]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unknown template id {0}")]
    UnknownTemplate(usize),

    #[error("template {0} is not a parity relation")]
    NonParityTemplate(usize),

    #[error("formula is satisfiable; {0}")]
    Satisfiable(&'static str),

    #[error("formula is unsatisfiable; {0}")]
    Unsatisfiable(&'static str),

    #[error("solver budget exhausted during {0}")]
    BudgetExceeded(&'static str),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("threshold search failed: {0}")]
    Threshold(String),

    #[error("config: {0}")]
    Config(String),

    #[error("instance has no constraints")]
    EmptyInstance,
}

fn hint_suffix(hint: &str) -> String {
    if hint.is_empty() {
        String::new()
    } else {
        format!("; {}", hint)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
