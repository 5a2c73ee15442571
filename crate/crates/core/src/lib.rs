//! Lex-leader symmetry breaking for models with unnamed types.

pub mod action;
pub mod cli;
pub mod engine;
pub mod modellang;
pub mod order;
pub mod perm;
pub mod symbreak;
pub mod values;
