use alloc::string::String;
use core::fmt;

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A formula or prefix violates its structural invariants.
    InvalidFormula(String),
    /// A tree decomposition is not valid for the graph it is used with.
    InvalidDecomposition(String),
    /// A vtree is malformed.
    InvalidVtree(String),
    /// A circuit breaks one of the structuredness rules.
    NotStructured(String),
    /// Two circuits must share a vtree but do not.
    VtreeMismatch,
    /// Vtree restructuring beyond renumbering is not supported.
    Unsupported(String),
    /// A named output does not exist.
    MissingOutput(String),
    /// A variable is referenced that the circuit (or formula) does not know.
    UnknownVariable(u32),
    /// An assignment leaves a variable of the circuit unset.
    Unassigned(u32),
    /// Model counting requires a deterministic circuit.
    NotDeterministic,
    /// A brute-force routine was asked to enumerate too many variables.
    TooManyVariables { count: usize, limit: usize },
    /// An OBDD operation requires a complete OBDD.
    NotComplete,
    /// A configurable width or gate ceiling was crossed.
    BudgetExceeded {
        stage: String,
        width: usize,
        gates: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFormula(msg) => write!(f, "invalid formula: {msg}"),
            Error::InvalidDecomposition(msg) => write!(f, "invalid tree decomposition: {msg}"),
            Error::InvalidVtree(msg) => write!(f, "invalid vtree: {msg}"),
            Error::NotStructured(msg) => write!(f, "circuit is not structured: {msg}"),
            Error::VtreeMismatch => f.write_str("circuits are not over the same vtree"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::MissingOutput(name) => write!(f, "no output named `{name}`"),
            Error::UnknownVariable(v) => write!(f, "unknown variable {v}"),
            Error::Unassigned(v) => write!(f, "variable {v} is not assigned"),
            Error::NotDeterministic => f.write_str("circuit is not flagged deterministic"),
            Error::TooManyVariables { count, limit } => {
                write!(f, "{count} variables exceed the enumeration limit of {limit}")
            }
            Error::NotComplete => f.write_str("OBDD is not complete"),
            Error::BudgetExceeded {
                stage,
                width,
                gates,
            } => write!(
                f,
                "budget exceeded during {stage} (width {width}, gates {gates})"
            ),
        }
    }
}

impl core::error::Error for Error {}
