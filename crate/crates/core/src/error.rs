use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("negative literal {literal} at line {line}")]
    NegativeLiteral { line: usize, literal: i64 },

    #[error("variable {var} out of range 1..={num_vars}")]
    VariableOutOfRange { var: usize, num_vars: usize },

    #[error("clause {clause} has {arity} literals, expected 3")]
    ClauseArity { clause: usize, arity: usize },

    #[error("clause {clause} repeats variable {var}")]
    RepeatedVariable { clause: usize, var: usize },

    #[error("variable {var} occurs {count} times, expected 4")]
    OccurrenceCount { var: usize, count: usize },

    #[error("assignment has {got} values but the formula has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },

    #[error("instance size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("assignment does not NAE-satisfy the formula")]
    NotSatisfying,

    #[error("order is not {threshold}-balancing: vertex {vertex} has left weight {left}, right weight {right}")]
    NotBalancing { threshold: u64, vertex: usize, left: u64, right: u64 },

    #[error("variable vertex {vertex} is surrounded by the clause vertices")]
    SurroundedVariable { vertex: usize },

    #[error("block I({owner},{toward}) has size {len}, not a multiple of {a}")]
    Indivisible { owner: usize, toward: usize, len: usize, a: usize },

    #[error("no node or edge carries a whole copy of the gadget of {owner} on both sides")]
    NoDefaultEdge { owner: usize },

    #[error("node {node} holds a partial gadget; grouping is incomplete")]
    GroupingIncomplete { node: usize },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 4,
            _ => 3,
        }
    }
}
