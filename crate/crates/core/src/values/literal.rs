//! Canonical literal syntax for values.
//!
//! ```text
//! true  false  -3  red  2_T
//! (a, b)
//! [a, b, c; index:T]          [[a, b], [c, d]; index:T, int(1..2)]
//! mset{a, a, b}   set{a, b}   function{1_T-->4, 2_T-->5}   relation{(1_T, 2_T)}
//! ```
//!
//! Values do not remember whether a multiset came from a set, function or
//! relation, so printing takes a [`Shape`] describing the intended form.

use std::sync::Arc;

use crate::modellang::lexer::{tokenize, Cursor, Tok};
use crate::modellang::ParseError;

use super::{Domain, EnumAtom, Matrix, Tag, Value};

/// How to print a value. `Plain` prints multisets as `mset{..}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Plain,
    Tuple(Vec<Shape>),
    Matrix(Box<Shape>),
    MSet(Box<Shape>),
    Set(Box<Shape>),
    Function(Box<Shape>, Box<Shape>),
    Relation(Vec<Shape>),
}

impl Shape {
    pub fn of_domain(d: &Domain) -> Shape {
        match d {
            Domain::Tuple(items) => Shape::Tuple(items.iter().map(Shape::of_domain).collect()),
            Domain::Matrix { elem, .. } => Shape::Matrix(Box::new(Shape::of_domain(elem))),
            Domain::MSet { elem, side, .. } => match (side, elem.as_ref()) {
                (super::SideCondition::None, e) => Shape::MSet(Box::new(Shape::of_domain(e))),
                (_, Domain::Tuple(parts)) => Shape::Function(
                    Box::new(Shape::of_domain(&parts[0])),
                    Box::new(Shape::of_domain(&parts[1])),
                ),
                (_, e) => Shape::MSet(Box::new(Shape::of_domain(e))),
            },
            Domain::Set(elem) => Shape::Set(Box::new(Shape::of_domain(elem))),
            Domain::Function { from, to, .. } => Shape::Function(
                Box::new(Shape::of_domain(from)),
                Box::new(Shape::of_domain(to)),
            ),
            Domain::Relation(items) => {
                Shape::Relation(items.iter().map(Shape::of_domain).collect())
            }
            _ => Shape::Plain,
        }
    }
}

pub fn format_value(v: &Value, shape: &Shape) -> String {
    let mut out = String::new();
    write_value(&mut out, v, shape);
    out
}

fn write_value(out: &mut String, v: &Value, shape: &Shape) {
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(n) => out.push_str(&n.to_string()),
        Value::Enum(e) => out.push_str(&e.name),
        Value::Unnamed(u) => {
            out.push_str(&u.index.to_string());
            out.push('_');
            out.push_str(u.tag.as_str());
        }
        Value::Tuple(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let s = match shape {
                    Shape::Tuple(parts) => parts.get(i).unwrap_or(&Shape::Plain),
                    _ => &Shape::Plain,
                };
                write_value(out, item, s);
            }
            out.push(')');
        }
        Value::Matrix(m) => {
            let elem = match shape {
                Shape::Matrix(e) => e.as_ref(),
                _ => &Shape::Plain,
            };
            write_matrix_level(out, m, 0, 0, elem);
            // the annotation goes inside the outermost bracket
            out.pop();
            out.push_str("; index:");
            for (i, list) in m.indices.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&index_annotation(list));
            }
            out.push(']');
        }
        Value::MSet(items) => match shape {
            Shape::Function(from, to) => {
                out.push_str("function{");
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    match item {
                        Value::Tuple(p) if p.len() == 2 => {
                            write_value(out, &p[0], from);
                            out.push_str("-->");
                            write_value(out, &p[1], to);
                        }
                        other => write_value(out, other, &Shape::Plain),
                    }
                }
                out.push('}');
            }
            Shape::Relation(parts) => {
                write_items(out, "relation{", items, &Shape::Tuple(parts.clone()));
            }
            Shape::Set(e) => write_items(out, "set{", items, e),
            Shape::MSet(e) => write_items(out, "mset{", items, e),
            _ => write_items(out, "mset{", items, &Shape::Plain),
        },
    }
}

fn write_items(out: &mut String, open: &str, items: &[Value], shape: &Shape) {
    out.push_str(open);
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_value(out, item, shape);
    }
    out.push('}');
}

fn write_matrix_level(out: &mut String, m: &Matrix, dim: usize, offset: usize, elem: &Shape) {
    let stride: usize = m.indices[dim + 1..].iter().map(Vec::len).product();
    out.push('[');
    for k in 0..m.indices[dim].len() {
        if k > 0 {
            out.push_str(", ");
        }
        let off = offset + k * stride;
        if dim + 1 == m.indices.len() {
            write_value(out, &m.entries[off], elem);
        } else {
            write_matrix_level(out, m, dim + 1, off, elem);
        }
    }
    out.push(']');
}

fn index_annotation(list: &[Value]) -> String {
    match list.first() {
        Some(Value::Unnamed(u)) => u.tag.to_string(),
        Some(Value::Bool(_)) => "bool".into(),
        Some(Value::Enum(e)) => e.ty.to_string(),
        Some(Value::Int(lo)) => format!("int({lo}..{})", lo + list.len() as i64 - 1),
        _ => "int(1..0)".into(),
    }
}

/// Declarations needed to read enum atoms and unnamed atoms in literals.
#[derive(Debug, Clone, Default)]
pub struct LiteralContext {
    enums: Vec<(Tag, Arc<[Arc<str>]>)>,
}

impl LiteralContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_enum(mut self, d: &Domain) -> Self {
        if let Domain::Enum { name, atoms } = d {
            self.enums.push((name.clone(), atoms.clone()));
        }
        self
    }

    fn enum_atom(&self, name: &str) -> Option<Value> {
        self.enums.iter().find_map(|(ty, atoms)| {
            atoms.iter().position(|a| a.as_ref() == name).map(|p| {
                Value::Enum(EnumAtom {
                    ty: ty.clone(),
                    pos: p as u32 + 1,
                    name: atoms[p].clone(),
                })
            })
        })
    }

    fn enum_domain(&self, name: &str) -> Option<Domain> {
        self.enums
            .iter()
            .find(|(ty, _)| ty.as_str() == name)
            .map(|(ty, atoms)| Domain::Enum {
                name: ty.clone(),
                atoms: atoms.clone(),
            })
    }
}

/// Parse one value literal; returns the value and the shape it was written in.
pub fn parse_value(text: &str, ctx: &LiteralContext) -> Result<(Value, Shape), ParseError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let v = parse_literal(&mut cur, ctx)?;
    if !cur.at(&Tok::Eof) {
        return Err(cur.error(format!("unexpected {} after value", cur.peek())));
    }
    Ok(v)
}

enum Raw {
    Leaf(Value, Shape),
    List(Vec<Raw>, Option<Vec<IndexSpec>>),
}

enum IndexSpec {
    Unnamed(String),
    Domain(Domain),
}

pub(crate) fn parse_literal(cur: &mut Cursor, ctx: &LiteralContext) -> Result<(Value, Shape), ParseError> {
    if cur.at(&Tok::LBrack) {
        let raw = parse_raw_list(cur, ctx)?;
        return raw_to_value(raw, cur);
    }
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok((Value::Int(n), Shape::Plain))
        }
        Tok::Minus => {
            cur.bump();
            match cur.bump() {
                Tok::Int(n) => Ok((Value::Int(-n), Shape::Plain)),
                other => Err(cur.error(format!("expected integer after `-`, found {other}"))),
            }
        }
        Tok::Atom(i, tag) => {
            cur.bump();
            if i == 0 {
                return Err(cur.error(format!("unnamed atom 0_{tag}: indices start at 1")));
            }
            Ok((Value::unnamed(Tag::new(&tag), i), Shape::Plain))
        }
        Tok::LParen => {
            cur.bump();
            let mut items = Vec::new();
            let mut trailing = false;
            while !cur.at(&Tok::RParen) {
                items.push(parse_literal(cur, ctx)?);
                trailing = false;
                if !cur.eat(&Tok::Comma) {
                    break;
                }
                trailing = true;
            }
            cur.expect(&Tok::RParen)?;
            if items.len() == 1 && !trailing {
                return Ok(items.pop().unwrap());
            }
            let (vals, shapes) = items.into_iter().unzip();
            Ok((Value::Tuple(vals), Shape::Tuple(shapes)))
        }
        Tok::Ident(word) => {
            cur.bump();
            match word.as_str() {
                "true" => Ok((Value::Bool(true), Shape::Plain)),
                "false" => Ok((Value::Bool(false), Shape::Plain)),
                "mset" | "set" | "relation" => {
                    let items = parse_braced(cur, ctx)?;
                    let elem = items.first().map(|(_, s)| s.clone()).unwrap_or(Shape::Plain);
                    let vals: Vec<Value> = items.into_iter().map(|(v, _)| v).collect();
                    Ok(match word.as_str() {
                        "mset" => (Value::mset(vals), Shape::MSet(Box::new(elem))),
                        "set" => (Value::set(vals), Shape::Set(Box::new(elem))),
                        _ => {
                            let parts = match elem {
                                Shape::Tuple(p) => p,
                                _ => Vec::new(),
                            };
                            (Value::set(vals), Shape::Relation(parts))
                        }
                    })
                }
                "function" => {
                    cur.expect(&Tok::LBrace)?;
                    let mut pairs = Vec::new();
                    let mut shapes = (Shape::Plain, Shape::Plain);
                    while !cur.at(&Tok::RBrace) {
                        let (a, sa) = parse_literal(cur, ctx)?;
                        cur.expect(&Tok::LongArrow)?;
                        let (b, sb) = parse_literal(cur, ctx)?;
                        if pairs.is_empty() {
                            shapes = (sa, sb);
                        }
                        pairs.push(Value::Tuple(vec![a, b]));
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    cur.expect(&Tok::RBrace)?;
                    let v = Value::set(pairs);
                    if let Value::MSet(items) = &v {
                        let firsts_distinct = items.windows(2).all(|w| match (&w[0], &w[1]) {
                            (Value::Tuple(a), Value::Tuple(b)) => a[0] != b[0],
                            _ => true,
                        });
                        if !firsts_distinct {
                            return Err(cur.error("function literal maps one argument to two values".into()));
                        }
                    }
                    Ok((v, Shape::Function(Box::new(shapes.0), Box::new(shapes.1))))
                }
                other => match ctx.enum_atom(other) {
                    Some(v) => Ok((v, Shape::Plain)),
                    None => Err(cur.error(format!("unknown atom `{other}`"))),
                },
            }
        }
        other => Err(cur.error(format!("expected a value, found {other}"))),
    }
}

fn parse_braced(cur: &mut Cursor, ctx: &LiteralContext) -> Result<Vec<(Value, Shape)>, ParseError> {
    cur.expect(&Tok::LBrace)?;
    let mut items = Vec::new();
    while !cur.at(&Tok::RBrace) {
        items.push(parse_literal(cur, ctx)?);
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect(&Tok::RBrace)?;
    Ok(items)
}

fn parse_raw_list(cur: &mut Cursor, ctx: &LiteralContext) -> Result<Raw, ParseError> {
    cur.expect(&Tok::LBrack)?;
    let mut items = Vec::new();
    while !cur.at(&Tok::RBrack) && !cur.at(&Tok::Semi) {
        if cur.at(&Tok::LBrack) {
            items.push(parse_raw_list(cur, ctx)?);
        } else {
            let (v, s) = parse_literal(cur, ctx)?;
            items.push(Raw::Leaf(v, s));
        }
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    let mut specs = None;
    if cur.eat(&Tok::Semi) {
        cur.eat_kw("index");
        cur.eat(&Tok::Colon);
        let mut list = Vec::new();
        loop {
            list.push(parse_index_spec(cur, ctx)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        specs = Some(list);
    }
    cur.expect(&Tok::RBrack)?;
    Ok(Raw::List(items, specs))
}

fn parse_index_spec(cur: &mut Cursor, ctx: &LiteralContext) -> Result<IndexSpec, ParseError> {
    let name = cur.ident()?;
    match name.as_str() {
        "bool" => Ok(IndexSpec::Domain(Domain::Bool)),
        "int" => {
            cur.expect(&Tok::LParen)?;
            let lo = signed_int(cur)?;
            cur.expect(&Tok::DotDot)?;
            let hi = signed_int(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(IndexSpec::Domain(Domain::int(lo, hi)))
        }
        other => Ok(match ctx.enum_domain(other) {
            Some(d) => IndexSpec::Domain(d),
            None => IndexSpec::Unnamed(other.to_string()),
        }),
    }
}

fn signed_int(cur: &mut Cursor) -> Result<i64, ParseError> {
    let neg = cur.eat(&Tok::Minus);
    match cur.bump() {
        Tok::Int(n) => Ok(if neg { -n } else { n }),
        other => Err(cur.error(format!("expected integer, found {other}"))),
    }
}

fn raw_to_value(raw: Raw, cur: &Cursor) -> Result<(Value, Shape), ParseError> {
    match raw {
        Raw::Leaf(v, s) => Ok((v, s)),
        Raw::List(items, specs) => {
            let specs = specs.unwrap_or_else(|| vec![IndexSpec::Domain(Domain::int(1, items.len() as i64))]);
            let mut dims: Vec<usize> = Vec::new();
            let mut entries = Vec::new();
            flatten_dims(Raw::List(items, None), specs.len(), 0, &mut dims, &mut entries, cur)?;
            let mut indices = Vec::with_capacity(specs.len());
            for (spec, &len) in specs.iter().zip(&dims) {
                let atoms = match spec {
                    IndexSpec::Unnamed(tag) => Domain::unnamed(tag, len as u32).atoms().unwrap(),
                    IndexSpec::Domain(d) => d.atoms().unwrap(),
                };
                if atoms.len() != len {
                    return Err(cur.error(format!(
                        "matrix dimension has {len} entries but its index domain has {}",
                        atoms.len()
                    )));
                }
                indices.push(atoms);
            }
            let mut elem_shape = Shape::Plain;
            let mut vals = Vec::with_capacity(entries.len());
            for (i, (v, s)) in entries.into_iter().enumerate() {
                if i == 0 {
                    elem_shape = s;
                }
                vals.push(v);
            }
            Ok((
                Value::Matrix(Matrix {
                    indices,
                    entries: vals,
                }),
                Shape::Matrix(Box::new(elem_shape)),
            ))
        }
    }
}

fn flatten_dims(
    raw: Raw,
    depth: usize,
    level: usize,
    dims: &mut Vec<usize>,
    out: &mut Vec<(Value, Shape)>,
    cur: &Cursor,
) -> Result<(), ParseError> {
    if level == depth {
        out.push(raw_to_value(raw, cur)?);
        return Ok(());
    }
    let Raw::List(items, None) = raw else {
        return Err(cur.error("matrix literal is not nested as deeply as its index list".into()));
    };
    if dims.len() == level {
        dims.push(items.len());
    } else if dims[level] != items.len() {
        return Err(cur.error("ragged matrix literal".into()));
    }
    for item in items {
        flatten_dims(item, depth, level + 1, dims, out, cur)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_canonical(items: &[Value]) -> bool {
        items.windows(2).all(|w| crate::order::total_cmp(&w[0], &w[1]).is_le())
    }

    fn parse(s: &str) -> (Value, Shape) {
        parse_value(s, &LiteralContext::new()).unwrap()
    }

    #[test]
    fn atoms_and_tuples() {
        assert_eq!(parse("2_T").0, Value::unnamed("T", 2));
        assert_eq!(parse("-7").0, Value::Int(-7));
        assert_eq!(
            parse("(true, 3)").0,
            Value::Tuple(vec![Value::Bool(true), Value::Int(3)])
        );
    }

    #[test]
    fn function_literal_round_trips() {
        let text = "function{1_T-->4, 2_T-->5, 3_T-->4}";
        let (v, shape) = parse(text);
        assert_eq!(format_value(&v, &shape), text);
    }

    #[test]
    fn function_literal_rejects_two_images() {
        assert!(parse_value("function{1_T-->4, 1_T-->5}", &LiteralContext::new()).is_err());
    }

    #[test]
    fn matrix_literal_with_unnamed_index() {
        let (v, shape) = parse("[1, 2, 3]");
        assert_eq!(format_value(&v, &shape), "[1, 2, 3; index:int(1..3)]");
        let (v, shape) = parse("[[1_U, 2_U, 3_U], [2_U, 3_U, 4_U]; index:T, int(1..3)]");
        let Value::Matrix(m) = &v else { panic!() };
        assert_eq!(m.indices[0], Domain::unnamed("T", 2).atoms().unwrap());
        assert_eq!(m.entries.len(), 6);
        assert_eq!(
            format_value(&v, &shape),
            "[[1_U, 2_U, 3_U], [2_U, 3_U, 4_U]; index:T, int(1..3)]"
        );
    }

    #[test]
    fn sets_are_deduplicated_and_sorted() {
        let (v, shape) = parse("set{3, 1, 3}");
        assert_eq!(v, Value::MSet(vec![Value::Int(1), Value::Int(3)]));
        assert_eq!(format_value(&v, &shape), "set{1, 3}");
        let (m, _) = parse("mset{2, 1, 2}");
        let Value::MSet(items) = &m else { panic!() };
        assert!(is_canonical(items));
        assert_eq!(items.len(), 3);
    }

    #[test]
    fn enum_atoms_need_context() {
        let colour = Domain::enumerated("Colour", &["red", "green"]);
        let ctx = LiteralContext::new().with_enum(&colour);
        let (v, _) = parse_value("[green, red; index:Colour]", &ctx).unwrap();
        let Value::Matrix(m) = v else { panic!() };
        assert_eq!(m.indices[0], colour.atoms().unwrap());
        assert!(parse_value("green", &LiteralContext::new()).is_err());
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        assert!(parse_value("[[1, 2], [3]; index:T, int(1..2)]", &LiteralContext::new()).is_err());
    }
}
