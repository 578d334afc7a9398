use thiserror::Error;

/// Errors raised by the algebra, instanton and identity routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("exponent leaves the quarter lattice: {0}")]
    LatticeOverflow(String),
    #[error("no grid point with nonzero denominators")]
    GridExhausted,
    #[error("identity grid needs {points} points, budget is {budget}")]
    GridBudgetExceeded { points: u128, budget: u128 },
    #[error("pole of order {order} at ε = 0 ({context})")]
    PoleDetected { order: i64, context: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("character cancellation failed: {0}")]
    CancellationFailure(String),
    #[error("zero weight in Euler class: {0}")]
    ZeroWeight(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("cell {0:?} is not in the diagram")]
    CellOutOfDiagram((i64, i64)),
    #[error("parameters outside the admissible range: {0}")]
    RangeViolation(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
