use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::ast::{BinOp, DomainExpr, Expr, Model, Quantifier, UnOp};
use super::eval::{eval_expr, resolve_domain, Env};
use crate::values::literal::LiteralContext;
use crate::values::{lower_domain, Domain, EnumAtom, Tag, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Bool,
    Int,
    Enum(Tag),
    Unnamed(Tag),
    Tuple(Vec<Type>),
    Matrix(Vec<Type>, Box<Type>),
    /// Sets, multisets and relations.
    Collection(Box<Type>),
    Function(Box<Type>, Box<Type>),
}

impl Type {
    pub fn of_domain(d: &Domain) -> Type {
        match d {
            Domain::Bool => Type::Bool,
            Domain::Int { .. } => Type::Int,
            Domain::Enum { name, .. } => Type::Enum(name.clone()),
            Domain::Unnamed { tag, .. } => Type::Unnamed(tag.clone()),
            Domain::Tuple(items) => Type::Tuple(items.iter().map(Type::of_domain).collect()),
            Domain::Matrix { indices, elem } => Type::Matrix(
                indices.iter().map(Type::of_domain).collect(),
                Box::new(Type::of_domain(elem)),
            ),
            Domain::MSet { elem, .. } | Domain::Set(elem) => {
                Type::Collection(Box::new(Type::of_domain(elem)))
            }
            Domain::Function { from, to, .. } => Type::Function(
                Box::new(Type::of_domain(from)),
                Box::new(Type::of_domain(to)),
            ),
            Domain::Relation(items) => Type::Collection(Box::new(Type::Tuple(
                items.iter().map(Type::of_domain).collect(),
            ))),
            Domain::Unsupported(_) => Type::Bool,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => f.write_str("bool"),
            Type::Int => f.write_str("int"),
            Type::Enum(t) | Type::Unnamed(t) => write!(f, "{t}"),
            Type::Tuple(items) => {
                f.write_str("(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Type::Matrix(idx, elem) => {
                f.write_str("matrix indexed by [")?;
                for (i, t) in idx.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "] of {elem}")
            }
            Type::Collection(elem) => write!(f, "collection of {elem}"),
            Type::Function(a, b) => write!(f, "function {a} --> {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// A model whose declarations have been resolved and constraints checked.
#[derive(Debug, Clone)]
pub struct CheckedModel {
    pub model: Model,
    pub lettings: Vec<(String, i64)>,
    pub enums: Vec<Domain>,
    /// Unnamed types in declaration order.
    pub tags: Vec<(Tag, u32)>,
    /// Decision variables in declaration order, with resolved domains.
    pub vars: Vec<(String, Domain)>,
}

impl CheckedModel {
    /// Environment with lettings, enum atoms and named types bound.
    pub fn env(&self) -> Env {
        let mut env = Env::new();
        for (name, n) in &self.lettings {
            env.set(name, Value::Int(*n));
        }
        for d in &self.enums {
            if let Domain::Enum { name, atoms } = d {
                env.define_type(name.as_str(), d.clone());
                for (i, a) in atoms.iter().enumerate() {
                    env.set(
                        a,
                        Value::Enum(EnumAtom {
                            ty: name.clone(),
                            pos: i as u32 + 1,
                            name: a.clone(),
                        }),
                    );
                }
            }
        }
        for (tag, size) in &self.tags {
            env.define_type(tag.as_str(), Domain::unnamed(tag.as_str(), *size));
        }
        env
    }

    pub fn literal_context(&self) -> LiteralContext {
        self.enums
            .iter()
            .fold(LiteralContext::new(), |ctx, d| ctx.with_enum(d))
    }

    pub fn names(&self) -> Arc<[String]> {
        self.vars.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn tag_size(&self, tag: &Tag) -> Option<u32> {
        self.tags.iter().find(|(t, _)| t == tag).map(|(_, s)| *s)
    }
}

/// Diagnostics for a parsed model; empty iff it is well typed.
pub fn typecheck(m: &Model) -> Vec<Diagnostic> {
    match check_model(m) {
        Ok(_) => Vec::new(),
        Err(diags) => diags,
    }
}

pub fn check_model(m: &Model) -> Result<CheckedModel, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut diag = |msg: String| diags.push(Diagnostic { message: msg });
    let mut env = Env::new();

    let mut lettings = Vec::new();
    for (name, e) in &m.int_lettings {
        match eval_expr(e, &mut env) {
            Ok(Value::Int(n)) => {
                env.set(name, Value::Int(n));
                lettings.push((name.clone(), n));
            }
            Ok(v) => diag(format!("letting {name}: expected an integer, found {v}")),
            Err(err) => diag(format!("letting {name}: {err}")),
        }
    }

    let mut enums = Vec::new();
    for (name, atoms) in &m.enum_decls {
        let atom_refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
        let d = Domain::enumerated(name, &atom_refs);
        env.define_type(name, d.clone());
        enums.push(d);
    }

    let mut tags = Vec::new();
    for (name, size) in &m.unnamed_decls {
        match eval_expr(size, &mut env) {
            Ok(Value::Int(n)) if n >= 1 && n <= u32::MAX as i64 => {
                env.define_type(name, Domain::unnamed(name, n as u32));
                tags.push((Tag::new(name), n as u32));
            }
            Ok(v) => diag(format!("type {name}: size must be a positive integer, found {v}")),
            Err(err) => diag(format!("type {name}: {err}")),
        }
    }

    let mut vars = Vec::new();
    for (name, dexpr) in &m.var_decls {
        match resolve_domain(dexpr, &mut env) {
            Ok(d) => {
                if let Err(err) = lower_domain(&d) {
                    diag(format!("find {name}: {err}"));
                } else if let Some(inner) = unbounded_mset(&d) {
                    diag(format!(
                        "find {name}: mset of {inner} needs a (maxOccur k) bound"
                    ));
                } else {
                    vars.push((name.clone(), d));
                }
            }
            Err(err) => diag(format!("find {name}: {err}")),
        }
    }

    let checked = CheckedModel {
        model: m.clone(),
        lettings,
        enums,
        tags,
        vars,
    };
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut scope = Scope::new(&checked);
    for (i, c) in m.constraints.iter().enumerate() {
        let mut local = Vec::new();
        match scope.check(c, &mut local) {
            Some(Type::Bool) => {}
            Some(t) => local.push(format!("expected a boolean constraint, found {t}")),
            None => {}
        }
        for msg in local {
            diags.push(Diagnostic {
                message: format!("constraint {}: {msg}", i + 1),
            });
        }
    }
    if diags.is_empty() {
        Ok(checked)
    } else {
        Err(diags)
    }
}

fn unbounded_mset(d: &Domain) -> Option<&Domain> {
    match d {
        Domain::MSet {
            elem,
            max_occur: None,
            ..
        } => Some(elem),
        Domain::MSet { elem, .. } | Domain::Set(elem) => unbounded_mset(elem),
        Domain::Matrix { elem, .. } => unbounded_mset(elem),
        Domain::Tuple(items) | Domain::Relation(items) => items.iter().find_map(unbounded_mset),
        Domain::Function { from, to, .. } => unbounded_mset(from).or_else(|| unbounded_mset(to)),
        _ => None,
    }
}

struct Scope {
    globals: HashMap<String, Type>,
    types: HashMap<String, Type>,
    locals: Vec<(String, Type)>,
}

impl Scope {
    fn new(m: &CheckedModel) -> Self {
        let mut globals = HashMap::new();
        let mut types = HashMap::new();
        for (name, _) in &m.lettings {
            globals.insert(name.clone(), Type::Int);
        }
        for d in &m.enums {
            if let Domain::Enum { name, atoms } = d {
                types.insert(name.to_string(), Type::Enum(name.clone()));
                for a in atoms.iter() {
                    globals.insert(a.to_string(), Type::Enum(name.clone()));
                }
            }
        }
        for (tag, _) in &m.tags {
            types.insert(tag.to_string(), Type::Unnamed(tag.clone()));
        }
        for (name, d) in &m.vars {
            globals.insert(name.clone(), Type::of_domain(d));
        }
        Scope {
            globals,
            types,
            locals: Vec::new(),
        }
    }

    fn lookup(&self, name: &str) -> Option<&Type> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .or_else(|| self.globals.get(name))
    }

    /// Type of `e`, or `None` after recording at least one error.
    fn check(&mut self, e: &Expr, errs: &mut Vec<String>) -> Option<Type> {
        match e {
            Expr::Bool(_) => Some(Type::Bool),
            Expr::Int(_) => Some(Type::Int),
            Expr::Atom(i, t) => {
                errs.push(format!(
                    "unnamed atom `{i}_{t}` cannot be written in a constraint"
                ));
                None
            }
            Expr::Name(n) => match self.lookup(n) {
                Some(t) => Some(t.clone()),
                None => {
                    errs.push(format!("unknown name `{n}`"));
                    None
                }
            },
            Expr::Tuple(items) => {
                let ts = self.check_all(items, errs)?;
                Some(Type::Tuple(ts))
            }
            Expr::Collection(_, items) => {
                let ts = self.check_all(items, errs)?;
                let Some(first) = ts.first() else {
                    errs.push("cannot infer the element type of an empty literal".into());
                    return None;
                };
                if ts.iter().any(|t| t != first) {
                    errs.push(format!("collection literal `{e}` mixes element types"));
                    return None;
                }
                Some(Type::Collection(Box::new(first.clone())))
            }
            Expr::Unary(op, x) => {
                let t = self.check(x, errs)?;
                let want = match op {
                    UnOp::Neg => Type::Int,
                    UnOp::Not => Type::Bool,
                };
                self.expect(&t, &want, x, errs)?;
                Some(want)
            }
            Expr::Binary(op, l, r) => {
                let lt = self.check(l, errs);
                let rt = self.check(r, errs);
                let (lt, rt) = (lt?, rt?);
                self.check_binary(*op, l, &lt, r, &rt, errs)
            }
            Expr::Index(x, args) => {
                let t = self.check(x, errs)?;
                match t {
                    Type::Matrix(idx, elem) => {
                        if args.is_empty() || args.len() > idx.len() {
                            errs.push(format!(
                                "`{x}` takes at most {} indices, found {}",
                                idx.len(),
                                args.len()
                            ));
                            return None;
                        }
                        let mut ok = true;
                        for (k, (a, want)) in args.iter().zip(&idx).enumerate() {
                            match self.check(a, errs) {
                                Some(got) if &got == want => {}
                                Some(got) => {
                                    ok = false;
                                    errs.push(format!(
                                        "index {} of `{x}`: expected {want}, found {got} `{a}`",
                                        k + 1
                                    ));
                                }
                                None => ok = false,
                            }
                        }
                        if !ok {
                            return None;
                        }
                        if args.len() == idx.len() {
                            Some(*elem)
                        } else {
                            Some(Type::Matrix(idx[args.len()..].to_vec(), elem))
                        }
                    }
                    Type::Tuple(items) => match args.as_slice() {
                        [Expr::Int(k)] if *k >= 1 && (*k as usize) <= items.len() => {
                            Some(items[*k as usize - 1].clone())
                        }
                        _ => {
                            errs.push(format!(
                                "tuple projection on `{x}` needs a constant index in 1..{}",
                                items.len()
                            ));
                            None
                        }
                    },
                    other => {
                        errs.push(format!("cannot index `{x}` of type {other}"));
                        None
                    }
                }
            }
            Expr::Apply(f, args) => {
                let t = self.check(f, errs)?;
                let Type::Function(from, to) = t else {
                    errs.push(format!("`{f}` is not a function"));
                    return None;
                };
                let mut ts = self.check_all(args, errs)?;
                let arg = if ts.len() == 1 {
                    ts.pop().unwrap()
                } else {
                    Type::Tuple(ts)
                };
                if arg != *from {
                    errs.push(format!("`{f}` expects {from}, found {arg}"));
                    return None;
                }
                Some(*to)
            }
            Expr::Card(x) => match self.check(x, errs)? {
                Type::Collection(_) | Type::Function(..) => Some(Type::Int),
                other => {
                    errs.push(format!("cardinality of `{x}` of type {other}"));
                    None
                }
            },
            Expr::ToInt(x) => {
                let t = self.check(x, errs)?;
                self.expect(&t, &Type::Bool, x, errs)?;
                Some(Type::Int)
            }
            Expr::Quant {
                kind,
                vars,
                domain,
                body,
            } => {
                let t = self.quantified_type(domain, errs)?;
                let n = self.locals.len();
                self.locals.extend(vars.iter().map(|v| (v.clone(), t.clone())));
                let bt = self.check(body, errs);
                self.locals.truncate(n);
                let bt = bt?;
                let want = match kind {
                    Quantifier::ForAll | Quantifier::Exists => Type::Bool,
                    Quantifier::Sum => Type::Int,
                };
                self.expect(&bt, &want, body, errs)?;
                Some(want)
            }
        }
    }

    fn check_all(&mut self, items: &[Expr], errs: &mut Vec<String>) -> Option<Vec<Type>> {
        let ts: Vec<Option<Type>> = items.iter().map(|x| self.check(x, errs)).collect();
        ts.into_iter().collect()
    }

    fn expect(&self, got: &Type, want: &Type, e: &Expr, errs: &mut Vec<String>) -> Option<()> {
        if got == want {
            Some(())
        } else {
            errs.push(format!("expected {want}, found {got} `{e}`"));
            None
        }
    }

    fn check_binary(
        &self,
        op: BinOp,
        l: &Expr,
        lt: &Type,
        r: &Expr,
        rt: &Type,
        errs: &mut Vec<String>,
    ) -> Option<Type> {
        match op {
            BinOp::And | BinOp::Or | BinOp::Implies => {
                let a = self.expect(lt, &Type::Bool, l, errs);
                let b = self.expect(rt, &Type::Bool, r, errs);
                a.and(b).map(|_| Type::Bool)
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                let a = self.expect(lt, &Type::Int, l, errs);
                let b = self.expect(rt, &Type::Int, r, errs);
                a.and(b).map(|_| Type::Int)
            }
            BinOp::Eq | BinOp::Neq => {
                if lt != rt {
                    errs.push(format!("cannot compare {lt} `{l}` with {rt} `{r}`"));
                    return None;
                }
                Some(Type::Bool)
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                if lt != rt {
                    errs.push(format!("cannot compare {lt} `{l}` with {rt} `{r}`"));
                    return None;
                }
                match lt {
                    Type::Int | Type::Bool | Type::Enum(_) => Some(Type::Bool),
                    Type::Unnamed(_) => {
                        errs.push(format!(
                            "unnamed atoms admit only =, != (in `{l} {} {r}`)",
                            op_symbol(op)
                        ));
                        None
                    }
                    other => {
                        errs.push(format!("ordered comparison needs atoms, found {other}"));
                        None
                    }
                }
            }
            BinOp::In => {
                let want = match rt {
                    Type::Collection(elem) => elem.as_ref().clone(),
                    Type::Function(a, b) => {
                        Type::Tuple(vec![a.as_ref().clone(), b.as_ref().clone()])
                    }
                    other => {
                        errs.push(format!("`in` needs a collection, found {other} `{r}`"));
                        return None;
                    }
                };
                self.expect(lt, &want, l, errs).map(|_| Type::Bool)
            }
        }
    }

    fn quantified_type(&mut self, d: &DomainExpr, errs: &mut Vec<String>) -> Option<Type> {
        match d {
            DomainExpr::Bool => Some(Type::Bool),
            DomainExpr::Int(lo, hi) => {
                let a = self.check(lo, errs);
                let b = self.check(hi, errs);
                let (a, b) = (a?, b?);
                self.expect(&a, &Type::Int, lo, errs)?;
                self.expect(&b, &Type::Int, hi, errs)?;
                Some(Type::Int)
            }
            DomainExpr::Named(n) => match self.types.get(n) {
                Some(t) => Some(t.clone()),
                None => {
                    errs.push(format!("unknown type `{n}`"));
                    None
                }
            },
            other => {
                errs.push(format!("cannot quantify over `{other}`"));
                None
            }
        }
    }
}

fn op_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        _ => "?",
    }
}
