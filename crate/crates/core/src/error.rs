use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Bad arguments: mixed algebras, wrong arity, non-pure triples and so on.
    #[error("usage error: {0}")]
    Usage(String),

    /// The input is well formed but the operation requires more of it,
    /// e.g. `S ⊆ R` for the copying construction.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown predicate id `{0}`")]
    UnknownPredicate(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("undeclared variable p{0}")]
    UndeclaredVariable(usize),

    /// Exhaustive enumeration would exceed the configured budget.
    #[error("resource limit: {what} needs {needed} cases, budget is {budget}")]
    Resource { what: String, needed: u128, budget: u128 },

    #[error("malformed input: {0}")]
    Format(String),

    /// A construction failed its own post-verification. Never expected to fire.
    #[error("internal verification failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
