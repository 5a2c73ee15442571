//! Flattening, brute-force enumeration and the orbit oracle.

pub mod flatten;
pub mod oracle;
pub mod solve;

use thiserror::Error;

use crate::modellang::EvalError;
use crate::values::ValueError;

pub use flatten::{flatten, FlatSpace, Layout};
pub use oracle::{orbit_oracle, OrbitReport};
pub use solve::{
    budget_from_env, enumerate_solutions, CompiledLex, Filter, SolveOptions, SolveResult,
};

/// Default bound on the number of flat assignments a search may visit.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "SYMBREAK_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("search space of {needed} assignments exceeds the budget of {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("element universe of {domain} has more than {limit} values")]
    Universe { domain: String, limit: u128 },
    #[error("constraint {index}: {source}")]
    Eval { index: usize, source: EvalError },
    #[error("constraints are not invariant under {perm}: image of solution {solution} is not a solution")]
    NotSymmetric { perm: String, solution: String },
    #[error(transparent)]
    Value(#[from] ValueError),
}
