//! Error type shared by the evaluation engines.

use thiserror::Error;

/// Errors raised while evaluating formulas over structures and teams.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` used with {found} argument(s), declared arity {declared}")]
    ArityMismatch {
        name: String,
        declared: usize,
        found: usize,
    },
    #[error("element {element} is outside the universe 0..{universe}")]
    ElementOutOfRange { element: u32, universe: u32 },
    #[error("team domain mismatch: {0}")]
    TeamDomain(String),
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
    #[error("fixed-point operator not supported by this engine")]
    FixpointNotSupported,
    #[error("dependency atom not supported by this engine")]
    DependencyAtomNotSupported,
    #[error("relation symbol `{0}` occurs negatively where only positive occurrences are allowed")]
    PositivityViolation(String),
    #[error("enumeration guard exceeded at an exists-node: {size} extension candidates > {limit} (pass force to override)")]
    ExistsGuard { size: usize, limit: usize },
    #[error("enumeration guard exceeded at a split-node: team of {size} rows > {limit} (pass force to override)")]
    SplitGuard { size: usize, limit: usize },
    #[error("fixed-point iteration failed to converge (non-monotone operator?)")]
    FixpointDiverged,
    #[error("choice function invalid: {0}")]
    ChoiceFunction(String),
}
