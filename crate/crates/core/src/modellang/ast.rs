use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub int_lettings: Vec<(String, Expr)>,
    pub enum_decls: Vec<(String, Vec<String>)>,
    /// Unnamed types with their size expressions.
    pub unnamed_decls: Vec<(String, Expr)>,
    pub var_decls: Vec<(String, DomainExpr)>,
    pub constraints: Vec<Expr>,
}

/// Domain as written; int bounds and sizes may mention lettings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainExpr {
    Bool,
    Int(Box<Expr>, Box<Expr>),
    Named(String),
    Tuple(Vec<DomainExpr>),
    Matrix(Vec<DomainExpr>, Box<DomainExpr>),
    Set(Box<DomainExpr>),
    MSet {
        elem: Box<DomainExpr>,
        max_occur: Option<Box<Expr>>,
    },
    Function {
        from: Box<DomainExpr>,
        to: Box<DomainExpr>,
        total: bool,
    },
    Relation(Vec<DomainExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    ForAll,
    Exists,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Implies,
    Or,
    And,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Implies => "->",
            BinOp::Or => "\\/",
            BinOp::And => "/\\",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionKind {
    Set,
    MSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    /// `2_T` written in an expression; rejected by the typechecker.
    Atom(u32, String),
    Name(String),
    Tuple(Vec<Expr>),
    Collection(CollectionKind, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Matrix indexing `M[i, j]` or tuple projection `t[k]`.
    Index(Box<Expr>, Vec<Expr>),
    /// Function application `f(x)`; several arguments form a tuple.
    Apply(Box<Expr>, Vec<Expr>),
    Card(Box<Expr>),
    ToInt(Box<Expr>),
    Quant {
        kind: Quantifier,
        vars: Vec<String>,
        domain: DomainExpr,
        body: Box<Expr>,
    },
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Quant { .. } => 0,
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(UnOp::Not, _) => 4,
            Expr::Unary(UnOp::Neg, _) => 8,
            _ => 9,
        }
    }

    /// Names referenced but not bound by a quantifier inside `self`.
    pub fn free_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match e {
        Expr::Name(n) => {
            if !bound.contains(n) && !out.contains(n) {
                out.push(n.clone());
            }
        }
        Expr::Bool(_) | Expr::Int(_) | Expr::Atom(..) => {}
        Expr::Tuple(items) | Expr::Collection(_, items) => {
            items.iter().for_each(|i| collect_free(i, bound, out))
        }
        Expr::Unary(_, x) | Expr::Card(x) | Expr::ToInt(x) => collect_free(x, bound, out),
        Expr::Binary(_, l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Expr::Index(x, args) | Expr::Apply(x, args) => {
            collect_free(x, bound, out);
            args.iter().for_each(|i| collect_free(i, bound, out));
        }
        Expr::Quant {
            vars, domain, body, ..
        } => {
            collect_free_domain(domain, bound, out);
            let n = bound.len();
            bound.extend(vars.iter().cloned());
            collect_free(body, bound, out);
            bound.truncate(n);
        }
    }
}

fn collect_free_domain(d: &DomainExpr, bound: &mut Vec<String>, out: &mut Vec<String>) {
    if let DomainExpr::Int(lo, hi) = d {
        collect_free(lo, bound, out);
        collect_free(hi, bound, out);
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Atom(i, t) => write!(f, "{i}_{t}"),
            Expr::Name(n) => f.write_str(n),
            Expr::Tuple(items) => {
                f.write_str("(")?;
                write_list(f, items)?;
                f.write_str(")")
            }
            Expr::Collection(kind, items) => {
                f.write_str(match kind {
                    CollectionKind::Set => "set{",
                    CollectionKind::MSet => "mset{",
                })?;
                write_list(f, items)?;
                f.write_str("}")
            }
            Expr::Unary(op, x) => {
                let p = self.precedence();
                f.write_str(match op {
                    UnOp::Neg => "-",
                    UnOp::Not => "!",
                })?;
                write_child(f, x, x.precedence() < p)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let (lp, rp) = (l.precedence(), r.precedence());
                // `->` is right associative; comparisons do not chain
                let (wrap_l, wrap_r) = match op {
                    BinOp::Implies => (lp <= p, rp < p),
                    _ if p == 5 => (lp <= p, rp <= p),
                    _ => (lp < p, rp <= p),
                };
                write_child(f, l, wrap_l)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, r, wrap_r)
            }
            Expr::Index(x, args) => {
                write_child(f, x, x.precedence() < 9)?;
                f.write_str("[")?;
                write_list(f, args)?;
                f.write_str("]")
            }
            Expr::Apply(x, args) => {
                write_child(f, x, x.precedence() < 9)?;
                f.write_str("(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Expr::Card(x) => write!(f, "|{x}|"),
            Expr::ToInt(x) => write!(f, "toInt({x})"),
            Expr::Quant {
                kind,
                vars,
                domain,
                body,
            } => {
                let kw = match kind {
                    Quantifier::ForAll => "forAll",
                    Quantifier::Exists => "exists",
                    Quantifier::Sum => "sum",
                };
                write!(f, "({kw} {} : {domain} . {body})", vars.join(", "))
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    // quantifiers print their own parentheses
    if wrap && !matches!(e, Expr::Quant { .. }) {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for DomainExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainExpr::Bool => f.write_str("bool"),
            DomainExpr::Int(lo, hi) => write!(f, "int({lo}..{hi})"),
            DomainExpr::Named(n) => f.write_str(n),
            DomainExpr::Tuple(items) => {
                f.write_str("tuple (")?;
                write_list(f, items)?;
                f.write_str(")")
            }
            DomainExpr::Matrix(idx, elem) => {
                f.write_str("matrix indexed by [")?;
                write_list(f, idx)?;
                write!(f, "] of {elem}")
            }
            DomainExpr::Set(elem) => write!(f, "set of {elem}"),
            DomainExpr::MSet { elem, max_occur } => match max_occur {
                Some(k) => write!(f, "mset (maxOccur {k}) of {elem}"),
                None => write!(f, "mset of {elem}"),
            },
            DomainExpr::Function { from, to, total } => {
                f.write_str("function ")?;
                if *total {
                    f.write_str("(total) ")?;
                }
                write!(f, "{from} --> {to}")
            }
            DomainExpr::Relation(items) => {
                f.write_str("relation of (")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, e) in &self.int_lettings {
            writeln!(f, "letting {name} be {e}")?;
        }
        for (name, atoms) in &self.enum_decls {
            writeln!(f, "letting {name} be new type enum {{{}}}", atoms.join(", "))?;
        }
        for (name, size) in &self.unnamed_decls {
            writeln!(f, "letting {name} be new type of size {size}")?;
        }
        for (name, d) in &self.var_decls {
            writeln!(f, "find {name} : {d}")?;
        }
        if !self.constraints.is_empty() {
            writeln!(f, "such that")?;
            for (i, c) in self.constraints.iter().enumerate() {
                let sep = if i + 1 < self.constraints.len() { "," } else { "" };
                writeln!(f, "    {c}{sep}")?;
            }
        }
        Ok(())
    }
}
