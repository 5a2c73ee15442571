use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, Cursor, Tok};
use super::ParseError;

/// Parse a model file.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let mut model = Model::default();
    let mut names: HashSet<String> = HashSet::new();

    let mut declare = |cur: &Cursor, name: &str| -> Result<(), ParseError> {
        if is_reserved(name) {
            return Err(cur.error(format!("`{name}` is a reserved word")));
        }
        if !names.insert(name.to_string()) {
            return Err(cur.error(format!("duplicate name `{name}`")));
        }
        Ok(())
    };

    while !cur.at(&Tok::Eof) {
        if cur.eat_kw("letting") {
            let name = cur.ident()?;
            declare(&cur, &name)?;
            cur.expect_kw("be")?;
            if cur.eat_kw("new") {
                cur.expect_kw("type")?;
                if cur.eat_kw("enum") {
                    cur.expect(&Tok::LBrace)?;
                    let mut atoms = Vec::new();
                    while !cur.at(&Tok::RBrace) {
                        let atom = cur.ident()?;
                        declare(&cur, &atom)?;
                        atoms.push(atom);
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    cur.expect(&Tok::RBrace)?;
                    if atoms.is_empty() {
                        return Err(cur.error(format!("enumerated type `{name}` has no values")));
                    }
                    model.enum_decls.push((name, atoms));
                } else {
                    cur.expect_kw("of")?;
                    cur.expect_kw("size")?;
                    let size = parse_expr(&mut cur)?;
                    model.unnamed_decls.push((name, size));
                }
            } else {
                let value = parse_expr(&mut cur)?;
                model.int_lettings.push((name, value));
            }
        } else if cur.eat_kw("find") {
            let mut vars = vec![cur.ident()?];
            while cur.eat(&Tok::Comma) {
                vars.push(cur.ident()?);
            }
            cur.expect(&Tok::Colon)?;
            let dom = parse_domain(&mut cur)?;
            for v in vars {
                declare(&cur, &v)?;
                model.var_decls.push((v, dom.clone()));
            }
        } else if cur.eat_kw("such") {
            cur.expect_kw("that")?;
            loop {
                model.constraints.push(parse_expr(&mut cur)?);
                if !cur.eat(&Tok::Comma) {
                    break;
                }
            }
        } else {
            return Err(cur.error(format!(
                "expected `letting`, `find` or `such that`, found {}",
                cur.peek()
            )));
        }
    }
    Ok(model)
}

const RESERVED: &[&str] = &[
    "letting", "be", "new", "type", "of", "size", "enum", "find", "such", "that", "matrix",
    "indexed", "by", "set", "mset", "function", "relation", "tuple", "int", "bool", "true",
    "false", "forAll", "exists", "sum", "in", "toInt", "total", "maxOccur",
];

fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

pub fn parse_domain(cur: &mut Cursor) -> Result<DomainExpr, ParseError> {
    let word = match cur.peek().clone() {
        Tok::Ident(w) => w,
        Tok::LParen => {
            cur.bump();
            let mut items = vec![parse_domain(cur)?];
            while cur.eat(&Tok::Comma) {
                items.push(parse_domain(cur)?);
            }
            cur.expect(&Tok::RParen)?;
            return Ok(if items.len() == 1 {
                items.pop().unwrap()
            } else {
                DomainExpr::Tuple(items)
            });
        }
        other => return Err(cur.error(format!("expected a domain, found {other}"))),
    };
    cur.bump();
    match word.as_str() {
        "bool" => Ok(DomainExpr::Bool),
        "int" => {
            cur.expect(&Tok::LParen)?;
            let lo = parse_additive(cur)?;
            cur.expect(&Tok::DotDot)?;
            let hi = parse_additive(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(DomainExpr::Int(Box::new(lo), Box::new(hi)))
        }
        "tuple" => {
            cur.expect(&Tok::LParen)?;
            let mut items = vec![parse_domain(cur)?];
            while cur.eat(&Tok::Comma) {
                items.push(parse_domain(cur)?);
            }
            cur.expect(&Tok::RParen)?;
            Ok(DomainExpr::Tuple(items))
        }
        "matrix" => {
            cur.expect_kw("indexed")?;
            cur.expect_kw("by")?;
            cur.expect(&Tok::LBrack)?;
            let mut idx = vec![parse_domain(cur)?];
            while cur.eat(&Tok::Comma) {
                idx.push(parse_domain(cur)?);
            }
            cur.expect(&Tok::RBrack)?;
            cur.expect_kw("of")?;
            Ok(DomainExpr::Matrix(idx, Box::new(parse_domain(cur)?)))
        }
        "set" => {
            cur.expect_kw("of")?;
            Ok(DomainExpr::Set(Box::new(parse_domain(cur)?)))
        }
        "mset" => {
            let mut max_occur = None;
            if cur.eat(&Tok::LParen) {
                cur.expect_kw("maxOccur")?;
                max_occur = Some(Box::new(parse_additive(cur)?));
                cur.expect(&Tok::RParen)?;
            }
            cur.expect_kw("of")?;
            Ok(DomainExpr::MSet {
                elem: Box::new(parse_domain(cur)?),
                max_occur,
            })
        }
        "function" => {
            let mut total = false;
            if cur.at(&Tok::LParen) && matches!(cur.peek_at(1), Tok::Ident(w) if w == "total") {
                cur.bump();
                cur.bump();
                cur.expect(&Tok::RParen)?;
                total = true;
            }
            let from = parse_domain(cur)?;
            cur.expect(&Tok::LongArrow)?;
            let to = parse_domain(cur)?;
            Ok(DomainExpr::Function {
                from: Box::new(from),
                to: Box::new(to),
                total,
            })
        }
        "relation" => {
            cur.expect_kw("of")?;
            cur.expect(&Tok::LParen)?;
            let mut items = vec![parse_domain(cur)?];
            while cur.eat(&Tok::Star) {
                items.push(parse_domain(cur)?);
            }
            cur.expect(&Tok::RParen)?;
            Ok(DomainExpr::Relation(items))
        }
        "partition" | "sequence" | "record" | "variant" => {
            Err(cur.error(format!("{word} domains are out of scope")))
        }
        _ if is_reserved(&word) => Err(cur.error(format!("expected a domain, found `{word}`"))),
        _ => Ok(DomainExpr::Named(word)),
    }
}

pub fn parse_expr(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let lhs = parse_or(cur)?;
    if cur.eat(&Tok::Arrow) {
        let rhs = parse_expr(cur)?;
        return Ok(Expr::binary(BinOp::Implies, lhs, rhs));
    }
    Ok(lhs)
}

fn parse_or(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = parse_and(cur)?;
    while cur.eat(&Tok::Or) {
        e = Expr::binary(BinOp::Or, e, parse_and(cur)?);
    }
    Ok(e)
}

fn parse_and(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = parse_not(cur)?;
    while cur.eat(&Tok::And) {
        e = Expr::binary(BinOp::And, e, parse_not(cur)?);
    }
    Ok(e)
}

fn parse_not(cur: &mut Cursor) -> Result<Expr, ParseError> {
    if cur.eat(&Tok::Bang) {
        return Ok(Expr::Unary(UnOp::Not, Box::new(parse_not(cur)?)));
    }
    parse_comparison(cur)
}

fn parse_comparison(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let lhs = parse_additive(cur)?;
    let op = match cur.peek() {
        Tok::Eq => BinOp::Eq,
        Tok::Neq => BinOp::Neq,
        Tok::Lt => BinOp::Lt,
        Tok::Le => BinOp::Le,
        Tok::Gt => BinOp::Gt,
        Tok::Ge => BinOp::Ge,
        Tok::Ident(w) if w == "in" => BinOp::In,
        _ => return Ok(lhs),
    };
    cur.bump();
    let rhs = parse_additive(cur)?;
    Ok(Expr::binary(op, lhs, rhs))
}

fn parse_additive(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = parse_multiplicative(cur)?;
    loop {
        let op = match cur.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            _ => return Ok(e),
        };
        cur.bump();
        e = Expr::binary(op, e, parse_multiplicative(cur)?);
    }
}

fn parse_multiplicative(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = parse_unary(cur)?;
    loop {
        let op = match cur.peek() {
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Mod,
            _ => return Ok(e),
        };
        cur.bump();
        e = Expr::binary(op, e, parse_unary(cur)?);
    }
}

fn parse_unary(cur: &mut Cursor) -> Result<Expr, ParseError> {
    if cur.eat(&Tok::Minus) {
        let inner = parse_unary(cur)?;
        return Ok(match inner {
            Expr::Int(n) => Expr::Int(-n),
            other => Expr::Unary(UnOp::Neg, Box::new(other)),
        });
    }
    parse_postfix(cur)
}

fn parse_postfix(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = parse_primary(cur)?;
    loop {
        if cur.eat(&Tok::LBrack) {
            let args = parse_args(cur, &Tok::RBrack)?;
            e = Expr::Index(Box::new(e), args);
        } else if cur.at(&Tok::LParen) && matches!(e, Expr::Name(_) | Expr::Index(..) | Expr::Apply(..)) {
            cur.bump();
            let args = parse_args(cur, &Tok::RParen)?;
            if args.is_empty() {
                return Err(cur.error("function application needs an argument".into()));
            }
            e = Expr::Apply(Box::new(e), args);
        } else {
            return Ok(e);
        }
    }
}

fn parse_args(cur: &mut Cursor, close: &Tok) -> Result<Vec<Expr>, ParseError> {
    let mut args = Vec::new();
    while !cur.at(close) {
        args.push(parse_expr(cur)?);
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect(close)?;
    Ok(args)
}

fn parse_primary(cur: &mut Cursor) -> Result<Expr, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Expr::Int(n))
        }
        Tok::Atom(i, t) => {
            cur.bump();
            Ok(Expr::Atom(i, t))
        }
        Tok::LParen => {
            cur.bump();
            let mut items = vec![parse_expr(cur)?];
            while cur.eat(&Tok::Comma) {
                items.push(parse_expr(cur)?);
            }
            cur.expect(&Tok::RParen)?;
            Ok(if items.len() == 1 {
                items.pop().unwrap()
            } else {
                Expr::Tuple(items)
            })
        }
        Tok::Bar => {
            cur.bump();
            let inner = parse_additive(cur)?;
            cur.expect(&Tok::Bar)?;
            Ok(Expr::Card(Box::new(inner)))
        }
        Tok::LBrace => {
            let items = parse_braced(cur)?;
            Ok(Expr::Collection(CollectionKind::Set, items))
        }
        Tok::Ident(w) => {
            cur.bump();
            match w.as_str() {
                "true" => Ok(Expr::Bool(true)),
                "false" => Ok(Expr::Bool(false)),
                "forAll" | "exists" | "sum" => {
                    let kind = match w.as_str() {
                        "forAll" => Quantifier::ForAll,
                        "exists" => Quantifier::Exists,
                        _ => Quantifier::Sum,
                    };
                    let mut vars = vec![cur.ident()?];
                    while cur.eat(&Tok::Comma) {
                        vars.push(cur.ident()?);
                    }
                    cur.expect(&Tok::Colon)?;
                    let domain = parse_domain(cur)?;
                    cur.expect(&Tok::Dot)?;
                    let body = parse_expr(cur)?;
                    Ok(Expr::Quant {
                        kind,
                        vars,
                        domain,
                        body: Box::new(body),
                    })
                }
                "toInt" => {
                    cur.expect(&Tok::LParen)?;
                    let inner = parse_expr(cur)?;
                    cur.expect(&Tok::RParen)?;
                    Ok(Expr::ToInt(Box::new(inner)))
                }
                "set" if cur.at(&Tok::LBrace) => {
                    Ok(Expr::Collection(CollectionKind::Set, parse_braced(cur)?))
                }
                "mset" if cur.at(&Tok::LBrace) => {
                    Ok(Expr::Collection(CollectionKind::MSet, parse_braced(cur)?))
                }
                _ if is_reserved(&w) => Err(cur.error(format!("unexpected keyword `{w}`"))),
                _ => Ok(Expr::Name(w)),
            }
        }
        other => Err(cur.error(format!("expected an expression, found {other}"))),
    }
}

fn parse_braced(cur: &mut Cursor) -> Result<Vec<Expr>, ParseError> {
    cur.expect(&Tok::LBrace)?;
    parse_args(cur, &Tok::RBrace)
}
