//! Evaluation of expressions over full assignments.
//!
//! Applying a function outside its defined pairs or indexing outside a
//! matrix is an error, except directly under a comparison or `in`, where the
//! comparison is simply false.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::{BinOp, CollectionKind, DomainExpr, Expr, Quantifier, UnOp};
use crate::order::total_cmp;
use crate::values::{Domain, Matrix, Value, ValueError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{function} is undefined at {arg}")]
    Undefined { function: String, arg: String },
    #[error("index {index} is out of range for {target}")]
    IndexOutOfRange { index: String, target: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("type error: {0}")]
    Type(String),
    #[error(transparent)]
    Domain(#[from] ValueError),
}

impl EvalError {
    /// Errors that a surrounding comparison turns into `false`.
    pub fn is_undefinedness(&self) -> bool {
        matches!(
            self,
            EvalError::Undefined { .. }
                | EvalError::IndexOutOfRange { .. }
                | EvalError::DivisionByZero
        )
    }
}

/// Bindings for names and named types.
#[derive(Debug, Clone, Default)]
pub struct Env {
    globals: HashMap<String, Value>,
    types: HashMap<String, Domain>,
    locals: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, v: Value) {
        match self.globals.get_mut(name) {
            Some(slot) => *slot = v,
            None => {
                self.globals.insert(name.to_string(), v);
            }
        }
    }

    pub fn define_type(&mut self, name: &str, d: Domain) {
        self.types.insert(name.to_string(), d);
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .or_else(|| self.globals.get(name))
    }

    pub fn named_type(&self, name: &str) -> Option<&Domain> {
        self.types.get(name)
    }
}

pub fn eval_expr(e: &Expr, env: &mut Env) -> Result<Value, EvalError> {
    match e {
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Int(n) => Ok(Value::Int(*n)),
        Expr::Atom(i, t) => Ok(Value::unnamed(t.as_str(), *i)),
        Expr::Name(n) => env.lookup(n).cloned().ok_or_else(|| EvalError::Unbound(n.clone())),
        Expr::Tuple(items) => Ok(Value::Tuple(eval_all(items, env)?)),
        Expr::Collection(kind, items) => {
            let vals = eval_all(items, env)?;
            Ok(match kind {
                CollectionKind::Set => Value::set(vals),
                CollectionKind::MSet => Value::mset(vals),
            })
        }
        Expr::Unary(UnOp::Neg, x) => {
            let n = as_int(&eval_expr(x, env)?)?;
            n.checked_neg().map(Value::Int).ok_or(EvalError::Overflow)
        }
        Expr::Unary(UnOp::Not, x) => Ok(Value::Bool(!as_bool(&eval_expr(x, env)?)?)),
        Expr::Binary(op, l, r) => eval_binary(*op, l, r, env),
        Expr::Index(x, args) => {
            let target = eval_expr(x, env)?;
            let args = eval_all(args, env)?;
            index(&target, &args)
        }
        Expr::Apply(f, args) => {
            let fv = eval_expr(f, env)?;
            let mut args = eval_all(args, env)?;
            let arg = if args.len() == 1 {
                args.pop().unwrap()
            } else {
                Value::Tuple(args)
            };
            apply(&fv, &arg, &f.to_string())
        }
        Expr::Card(x) => match eval_expr(x, env)? {
            Value::MSet(items) => Ok(Value::Int(items.len() as i64)),
            other => Err(EvalError::Type(format!("cardinality of {other}"))),
        },
        Expr::ToInt(x) => Ok(Value::Int(as_bool(&eval_expr(x, env)?)? as i64)),
        Expr::Quant {
            kind,
            vars,
            domain,
            body,
        } => {
            let d = resolve_domain(domain, env)?;
            let atoms = d
                .atoms()
                .ok_or_else(|| EvalError::Type(format!("cannot quantify over {d}")))?;
            let mut acc = match kind {
                Quantifier::ForAll => Value::Bool(true),
                Quantifier::Exists => Value::Bool(false),
                Quantifier::Sum => Value::Int(0),
            };
            quantify(*kind, vars, &atoms, body, env, &mut acc)?;
            Ok(acc)
        }
    }
}

/// Evaluate a boolean expression.
pub fn eval_bool(e: &Expr, env: &mut Env) -> Result<bool, EvalError> {
    as_bool(&eval_expr(e, env)?)
}

fn eval_all(items: &[Expr], env: &mut Env) -> Result<Vec<Value>, EvalError> {
    items.iter().map(|x| eval_expr(x, env)).collect()
}

/// Returns `false` once the accumulator is decided.
fn quantify(
    kind: Quantifier,
    vars: &[String],
    atoms: &[Value],
    body: &Expr,
    env: &mut Env,
    acc: &mut Value,
) -> Result<bool, EvalError> {
    let Some((first, rest)) = vars.split_first() else {
        let v = eval_expr(body, env)?;
        return Ok(match (kind, acc) {
            (Quantifier::ForAll, acc) => {
                let b = as_bool(&v)?;
                *acc = Value::Bool(b);
                b
            }
            (Quantifier::Exists, acc) => {
                let b = as_bool(&v)?;
                *acc = Value::Bool(b);
                !b
            }
            (Quantifier::Sum, Value::Int(total)) => {
                *total = total.checked_add(as_int(&v)?).ok_or(EvalError::Overflow)?;
                true
            }
            (Quantifier::Sum, _) => unreachable!("sum accumulator is an integer"),
        });
    };
    for atom in atoms {
        env.locals.push((first.clone(), atom.clone()));
        let result = quantify(kind, rest, atoms, body, env, acc);
        env.locals.pop();
        if !result? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eval_binary(op: BinOp, l: &Expr, r: &Expr, env: &mut Env) -> Result<Value, EvalError> {
    match op {
        BinOp::And => Ok(Value::Bool(eval_bool(l, env)? && eval_bool(r, env)?)),
        BinOp::Or => Ok(Value::Bool(eval_bool(l, env)? || eval_bool(r, env)?)),
        BinOp::Implies => Ok(Value::Bool(!eval_bool(l, env)? || eval_bool(r, env)?)),
        BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => {
            let (a, b) = match (eval_expr(l, env), eval_expr(r, env)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(err), _) | (_, Err(err)) if err.is_undefinedness() => {
                    return Ok(Value::Bool(false))
                }
                (Err(err), _) | (_, Err(err)) => return Err(err),
            };
            let ord = || total_cmp(&a, &b);
            Ok(Value::Bool(match op {
                BinOp::Eq => a == b,
                BinOp::Neq => a != b,
                BinOp::Lt => ord().is_lt(),
                BinOp::Le => ord().is_le(),
                BinOp::Gt => ord().is_gt(),
                BinOp::Ge => ord().is_ge(),
                _ => match &b {
                    Value::MSet(items) => items.contains(&a),
                    other => return Err(EvalError::Type(format!("membership in {other}"))),
                },
            }))
        }
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
            let a = as_int(&eval_expr(l, env)?)?;
            let b = as_int(&eval_expr(r, env)?)?;
            arith(op, a, b).map(Value::Int)
        }
    }
}

/// Integer arithmetic; division rounds towards negative infinity.
fn arith(op: BinOp, a: i64, b: i64) -> Result<i64, EvalError> {
    let out = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::Div | BinOp::Mod => {
            if b == 0 {
                return Err(EvalError::DivisionByZero);
            }
            let q = a.checked_div(b).ok_or(EvalError::Overflow)?;
            let q = if a % b != 0 && ((a < 0) != (b < 0)) { q - 1 } else { q };
            if op == BinOp::Div {
                Some(q)
            } else {
                Some(a - b * q)
            }
        }
        _ => unreachable!("not an arithmetic operator"),
    };
    out.ok_or(EvalError::Overflow)
}

fn index(target: &Value, args: &[Value]) -> Result<Value, EvalError> {
    let out_of_range = |i: &Value| EvalError::IndexOutOfRange {
        index: i.to_string(),
        target: target.to_string(),
    };
    match target {
        Value::Matrix(m) => {
            if args.is_empty() || args.len() > m.indices.len() {
                return Err(EvalError::Type(format!(
                    "{} indices for a {}-dimensional matrix",
                    args.len(),
                    m.indices.len()
                )));
            }
            let mut offset = 0;
            for (arg, list) in args.iter().zip(&m.indices) {
                let k = list.iter().position(|x| x == arg).ok_or_else(|| out_of_range(arg))?;
                offset = offset * list.len() + k;
            }
            let rest = &m.indices[args.len()..];
            let width: usize = rest.iter().map(Vec::len).product();
            if rest.is_empty() {
                Ok(m.entries[offset].clone())
            } else {
                Ok(Value::Matrix(Matrix {
                    indices: rest.to_vec(),
                    entries: m.entries[offset * width..(offset + 1) * width].to_vec(),
                }))
            }
        }
        Value::Tuple(items) => match args {
            [Value::Int(k)] if *k >= 1 && (*k as usize) <= items.len() => {
                Ok(items[*k as usize - 1].clone())
            }
            [k] => Err(out_of_range(k)),
            _ => Err(EvalError::Type("tuple projection takes one index".into())),
        },
        other => Err(EvalError::Type(format!("cannot index {other}"))),
    }
}

fn apply(f: &Value, arg: &Value, name: &str) -> Result<Value, EvalError> {
    let Value::MSet(pairs) = f else {
        return Err(EvalError::Type(format!("cannot apply {f}")));
    };
    pairs
        .iter()
        .find_map(|p| match p {
            Value::Tuple(kv) if kv.len() == 2 && &kv[0] == arg => Some(kv[1].clone()),
            _ => None,
        })
        .ok_or_else(|| EvalError::Undefined {
            function: name.to_string(),
            arg: arg.to_string(),
        })
}

fn as_bool(v: &Value) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(EvalError::Type(format!("expected a boolean, found {other}"))),
    }
}

fn as_int(v: &Value) -> Result<i64, EvalError> {
    match v {
        Value::Int(n) => Ok(*n),
        other => Err(EvalError::Type(format!("expected an integer, found {other}"))),
    }
}

/// Resolve a written domain against the lettings and types in `env`.
pub fn resolve_domain(d: &DomainExpr, env: &mut Env) -> Result<Domain, EvalError> {
    Ok(match d {
        DomainExpr::Bool => Domain::Bool,
        DomainExpr::Int(lo, hi) => {
            let lo = as_int(&eval_expr(lo, env)?)?;
            let hi = as_int(&eval_expr(hi, env)?)?;
            if lo > hi {
                return Err(ValueError::EmptyIntRange { lo, hi }.into());
            }
            Domain::int(lo, hi)
        }
        DomainExpr::Named(n) => env
            .named_type(n)
            .cloned()
            .ok_or_else(|| EvalError::UnknownType(n.clone()))?,
        DomainExpr::Tuple(items) => Domain::Tuple(resolve_all(items, env)?),
        DomainExpr::Matrix(idx, elem) => {
            Domain::matrix(resolve_all(idx, env)?, resolve_domain(elem, env)?)
        }
        DomainExpr::Set(elem) => Domain::set(resolve_domain(elem, env)?),
        DomainExpr::MSet { elem, max_occur } => {
            let bound = match max_occur {
                Some(k) => {
                    let k = as_int(&eval_expr(k, env)?)?;
                    Some(u32::try_from(k).ok().filter(|k| *k >= 1).ok_or_else(|| {
                        EvalError::Type(format!("maxOccur must be positive, found {k}"))
                    })?)
                }
                None => None,
            };
            Domain::mset(resolve_domain(elem, env)?, bound)
        }
        DomainExpr::Function { from, to, total } => Domain::function(
            resolve_domain(from, env)?,
            resolve_domain(to, env)?,
            *total,
        ),
        DomainExpr::Relation(items) => Domain::Relation(resolve_all(items, env)?),
    })
}

fn resolve_all(items: &[DomainExpr], env: &mut Env) -> Result<Vec<Domain>, EvalError> {
    items.iter().map(|d| resolve_domain(d, env)).collect()
}
