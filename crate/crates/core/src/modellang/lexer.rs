use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// `3_T`: index and tag of an unnamed atom.
    Atom(u32, String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Dot,
    DotDot,
    Bar,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Arrow,
    LongArrow,
    And,
    Or,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Atom(i, t) => write!(f, "`{i}_{t}`"),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Colon => ":",
                    Tok::Semi => ";",
                    Tok::Dot => ".",
                    Tok::DotDot => "..",
                    Tok::Bar => "|",
                    Tok::Eq => "=",
                    Tok::Neq => "!=",
                    Tok::Lt => "<",
                    Tok::Le => "<=",
                    Tok::Gt => ">",
                    Tok::Ge => ">=",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Slash => "/",
                    Tok::Percent => "%",
                    Tok::Arrow => "->",
                    Tok::LongArrow => "-->",
                    Tok::And => "/\\",
                    Tok::Or => "\\/",
                    Tok::Bang => "!",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Split `src` into tokens. `$` starts a comment running to the end of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '$' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let peek = |k: usize| chars.get(i + k).copied();

        let (tok, len) = if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n: i64 = digits.parse().map_err(|_| ParseError {
                line,
                col,
                message: format!("integer literal {digits} out of range"),
            })?;
            if chars.get(j) == Some(&'_') && chars.get(j + 1).is_some_and(|c| is_ident_start(*c)) {
                let mut k = j + 1;
                while k < chars.len() && is_ident_char(chars[k]) {
                    k += 1;
                }
                let tag: String = chars[j + 1..k].iter().collect();
                let idx = u32::try_from(n).map_err(|_| ParseError {
                    line,
                    col,
                    message: format!("atom index {n} out of range"),
                })?;
                (Tok::Atom(idx, tag), k - i)
            } else {
                (Tok::Int(n), j - i)
            }
        } else if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            match (c, peek(1), peek(2)) {
                ('-', Some('-'), Some('>')) => (Tok::LongArrow, 3),
                ('-', Some('>'), _) => (Tok::Arrow, 2),
                ('.', Some('.'), _) => (Tok::DotDot, 2),
                ('!', Some('='), _) => (Tok::Neq, 2),
                ('<', Some('='), _) => (Tok::Le, 2),
                ('>', Some('='), _) => (Tok::Ge, 2),
                ('/', Some('\\'), _) => (Tok::And, 2),
                ('\\', Some('/'), _) => (Tok::Or, 2),
                ('=', Some('='), _) => (Tok::Eq, 2),
                ('(', ..) => (Tok::LParen, 1),
                (')', ..) => (Tok::RParen, 1),
                ('[', ..) => (Tok::LBrack, 1),
                (']', ..) => (Tok::RBrack, 1),
                ('{', ..) => (Tok::LBrace, 1),
                ('}', ..) => (Tok::RBrace, 1),
                (',', ..) => (Tok::Comma, 1),
                (':', ..) => (Tok::Colon, 1),
                (';', ..) => (Tok::Semi, 1),
                ('.', ..) => (Tok::Dot, 1),
                ('|', ..) => (Tok::Bar, 1),
                ('=', ..) => (Tok::Eq, 1),
                ('<', ..) => (Tok::Lt, 1),
                ('>', ..) => (Tok::Gt, 1),
                ('+', ..) => (Tok::Plus, 1),
                ('-', ..) => (Tok::Minus, 1),
                ('*', ..) => (Tok::Star, 1),
                ('/', ..) => (Tok::Slash, 1),
                ('%', ..) => (Tok::Percent, 1),
                ('!', ..) => (Tok::Bang, 1),
                _ => {
                    return Err(ParseError {
                        line,
                        col,
                        message: format!("unexpected character {c:?}"),
                    })
                }
            }
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Cursor over a token vector, shared by the model and literal parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    pub fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.peek())))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {other}"))),
        }
    }

    pub fn error(&self, message: String) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            message,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_atoms() {
        assert_eq!(
            kinds("1_T-->4 -> - ..."),
            vec![
                Tok::Atom(1, "T".into()),
                Tok::LongArrow,
                Tok::Int(4),
                Tok::Arrow,
                Tok::Minus,
                Tok::DotDot,
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("$ comment\n  find x").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("find".into()));
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
        assert_eq!((toks[1].line, toks[1].col), (2, 8));
    }

    #[test]
    fn logical_connectives() {
        assert_eq!(
            kinds("a /\\ b \\/ !c != d"),
            vec![
                Tok::Ident("a".into()),
                Tok::And,
                Tok::Ident("b".into()),
                Tok::Or,
                Tok::Bang,
                Tok::Ident("c".into()),
                Tok::Neq,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bad_character_reports_position() {
        let err = tokenize("find x\n  @").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }
}
