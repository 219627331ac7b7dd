//! Text grammar for ring elements and ring descriptions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power (['*'|'/'] power)*        // '*' may be omitted
//! power  := atom ['^' integer]
//! atom   := integer | identifier | '(' expr ')'
//! ring   := field ['[' vars ']'] ['/' '(' relations ')']  |  field 'x' field
//! ```
//!
//! Division is evaluated in the target algebra and requires a unit divisor,
//! so `1/2*x` works everywhere and `1/t` works in a localization at `t`.

use num_bigint::BigInt;

use super::scalar::Field;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var { name: String, offset: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

struct Lexer<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            text,
            toks: Vec::new(),
        };
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().unwrap();
                lx.toks.push((Tok::Int(n), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(text[start..i].to_string()), start));
            } else if "+-*/^()".contains(c) {
                lx.toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(Error::parse_at(lx.text, i, format!("unexpected character `{c}`")));
            }
        }
        Ok(lx.toks)
    }
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |(_, o)| *o)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse_at(self.text, self.offset(), msg))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let off = self.offset();
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.power()?), off);
            } else if matches!(self.peek(), Some(Tok::Int(_) | Tok::Ident(_) | Tok::Sym('('))) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .or_else(|_| self.err("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => self.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Var { name, offset: off })
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected `{t}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses one polynomial or fraction expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { text, toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Splits at commas that are not nested in brackets.
pub fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' | '<' => depth += 1,
            ')' | ']' | '>' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = text[start..].trim();
    if !last.is_empty() || !parts.is_empty() {
        parts.push(last);
    }
    parts
}

/// A parsed (not yet constructed) algebra description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    pub field: Field,
    pub vars: Vec<String>,
    pub relations: Vec<String>,
    /// Character offset of each relation in the parsed text.
    pub offsets: Vec<usize>,
}

/// Parses `QQ[x,y]`, `GF(5)[x,y]/(x^2+y^2-1)`, `GF(3)` or `GF(3)xGF(3)`.
pub fn parse_ring(text: &str) -> Result<RingSpec> {
    let t = text.trim();
    if let Some((a, b)) = split_product(t) {
        let fa = Field::parse(a)?;
        let fb = Field::parse(b)?;
        if fa != fb {
            return Err(Error::FieldMismatch {
                left: fa.to_string(),
                right: fb.to_string(),
            });
        }
        return Ok(RingSpec {
            field: fa,
            vars: vec!["e".into()],
            relations: vec!["e^2 - e".into()],
            offsets: vec![0],
        });
    }
    let (head, rels) = match t.find("]/") {
        Some(k) => (&t[..=k], Some(t[k + 2..].trim())),
        None => (t, None),
    };
    let (field_txt, vars) = match head.find('[') {
        Some(k) => {
            let inner = head[k + 1..]
                .strip_suffix(']')
                .ok_or_else(|| Error::parse_at(t, head.len(), "expected `]`"))?;
            let vars: Vec<String> = split_top_level(inner)
                .into_iter()
                .map(str::to_string)
                .collect();
            for (i, v) in vars.iter().enumerate() {
                let ok = v
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !ok {
                    return Err(Error::parse_at(t, k + 1, format!("bad variable name `{v}`")));
                }
                if vars[..i].contains(v) {
                    return Err(Error::parse_at(t, k + 1, format!("duplicate variable `{v}`")));
                }
            }
            (&head[..k], vars)
        }
        None => (head, Vec::new()),
    };
    let field = Field::parse(field_txt)?;
    let (relations, offsets) = match rels {
        None => (Vec::new(), Vec::new()),
        Some(r) => {
            let inner = r
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| r.strip_prefix('<').and_then(|r| r.strip_suffix('>')))
                .ok_or_else(|| Error::parse_at(t, t.len() - r.len(), "expected `(relations)`"))?;
            let parts = split_top_level(inner);
            let offsets = parts
                .iter()
                .map(|p| text[..p.as_ptr() as usize - text.as_ptr() as usize].chars().count())
                .collect();
            (parts.into_iter().map(str::to_string).collect(), offsets)
        }
    };
    Ok(RingSpec {
        field,
        vars,
        relations,
        offsets,
    })
}

fn split_product(t: &str) -> Option<(&str, &str)> {
    let k = t.find(")x")?;
    let (a, b) = (&t[..=k], &t[k + 2..]);
    (a.starts_with("GF(") && b.starts_with("GF(")).then_some((a, b))
}
