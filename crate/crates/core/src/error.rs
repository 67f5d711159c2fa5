use std::fmt;

use crate::expr::VarId;

/// Syntax error in polynomial source text, 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("polynomial has no terms")]
    EmptyPolynomial,
    #[error("unknown variable id {0}")]
    UnknownVariable(VarId),
    #[error("unknown variable '{0}'")]
    UnknownName(String),
    #[error("variable {0} appears more than once in the scheme")]
    DuplicateVariable(String),
    #[error("invalid variable name '{0}'")]
    InvalidVariable(String),
    #[error("polynomials are over different variable tables")]
    VariableTableMismatch,
    #[error("scheme covers {got} of {expected} variables; a complete permutation is required")]
    IncompleteScheme { got: usize, expected: usize },
    #[error("node has unexpanded children")]
    NodeNotExpanded,
    #[error("iteration {iteration} is past the iteration budget {budget}")]
    IterationOutOfRange { iteration: u64, budget: u64 },
    #[error("exhaustive search over {vars} variables exceeds the cap of {cap}; use mcts instead")]
    ExhaustiveCapExceeded { vars: usize, cap: usize },
    #[error("resolvent degree sum {sum} exceeds the cap of {cap}")]
    ResolventCapExceeded { sum: u32, cap: u32 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed straight-line code at line {line}: {message}")]
    Code { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
