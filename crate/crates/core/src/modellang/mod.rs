//! The `.um` modelling language: lexer, parser, typechecker and evaluator.

pub mod ast;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod typecheck;

use thiserror::Error;

pub use ast::{BinOp, DomainExpr, Expr, Model};
pub use eval::{eval_bool, eval_expr, Env, EvalError};
pub use parser::parse_model;
pub use typecheck::{check_model, typecheck, CheckedModel, Diagnostic, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}
