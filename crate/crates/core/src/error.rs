use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("solution has no centers")]
    EmptySolution,
    #[error("request set is empty")]
    EmptyRequests,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operation not supported by this backend: {0}")]
    Unsupported(String),
    #[error("no radius satisfies the density condition for guess {guess}")]
    GuessTooLarge { guess: f64 },
    #[error("continuous ball intersection did not converge within {budget} steps")]
    BudgetExceeded { budget: usize },
    #[error("enumeration of {count} subsets exceeds the budget of {budget}")]
    TooLarge { count: u128, budget: u128 },
    #[error("no guess produced a solution")]
    NoSolutionFound(Box<SolveReport>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
