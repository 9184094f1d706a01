use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A chain could not be built, or a coefficient generator failed at `index`.
    #[error("invalid chain at index {index}: {reason}")]
    Construction { index: usize, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    /// Three-term recursion could not advance past degree `degree`.
    #[error("recursion breaks down at degree {degree}: {reason}")]
    Recursion { degree: usize, reason: String },

    #[error("zero denominator Pochhammer factor at term {term}")]
    ZeroDenominator { term: usize },

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("argument {value} outside the domain: {reason}")]
    Domain { value: f64, reason: String },

    #[error("Gram block {index} is singular (condition estimate {condition:e})")]
    SingularGram { index: usize, condition: f64 },

    #[error("orthogonality check failed for ({i}, {j}): defect {defect:e}")]
    Orthogonality { i: usize, j: usize, defect: f64 },

    #[error("state {state} is transient; use return_probability instead")]
    Transient { state: usize },

    #[error("chain is not stochastic: {reason}")]
    NotStochastic { reason: String },

    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },

    #[error("chain spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
