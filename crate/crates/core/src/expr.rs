//! Integer index expressions such as `g-1`, `r+10` or `2i-6`.
//!
//! Variables are bound per evaluation: `g`, `r`, `h` and `nc` (the number of
//! `c` curves) come from the genus, loop variables from `forall` ranges.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::surface::GenusConfig;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(i64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

/// Variable bindings for expression evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, i64>);

impl Bindings {
    pub fn for_genus(cfg: &GenusConfig) -> Self {
        let mut b = Bindings::default();
        b.set("g", cfg.genus() as i64);
        b.set("r", cfg.r() as i64);
        b.set("h", cfg.h() as i64);
        b.set("nc", cfg.num_c() as i64);
        b
    }

    pub fn set(&mut self, var: &str, value: i64) {
        self.0.insert(var.to_string(), value);
    }

    pub fn get(&self, var: &str) -> Option<i64> {
        self.0.get(var).copied()
    }

    pub fn with(&self, var: &str, value: i64) -> Self {
        let mut b = self.clone();
        b.set(var, value);
        b
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> Result<i64> {
        Ok(match self {
            Expr::Num(n) => *n,
            Expr::Var(v) => b.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?,
            Expr::Neg(e) => -e.eval(b)?,
            Expr::Add(x, y) => x.eval(b)? + y.eval(b)?,
            Expr::Sub(x, y) => x.eval(b)? - y.eval(b)?,
            Expr::Mul(x, y) => x.eval(b)? * y.eval(b)?,
        })
    }

    /// `self + delta`, folding constants where that keeps the text readable.
    pub fn shifted(&self, delta: i64) -> Expr {
        match self {
            Expr::Num(n) => Expr::Num(n + delta),
            Expr::Add(x, y) => match **y {
                Expr::Num(n) => Expr::Add(x.clone(), Box::new(Expr::Num(n + delta))).normalized(),
                _ => Expr::Add(Box::new(self.clone()), Box::new(Expr::Num(delta))).normalized(),
            },
            Expr::Sub(x, y) => match **y {
                Expr::Num(n) => Expr::Sub(x.clone(), Box::new(Expr::Num(n - delta))).normalized(),
                _ => Expr::Add(Box::new(self.clone()), Box::new(Expr::Num(delta))).normalized(),
            },
            _ => Expr::Add(Box::new(self.clone()), Box::new(Expr::Num(delta))).normalized(),
        }
    }

    fn normalized(self) -> Expr {
        match self {
            Expr::Add(x, y) => match *y {
                Expr::Num(0) => *x,
                Expr::Num(n) if n < 0 => Expr::Sub(x, Box::new(Expr::Num(-n))),
                y => Expr::Add(x, Box::new(y)),
            },
            Expr::Sub(x, y) => match *y {
                Expr::Num(0) => *x,
                Expr::Num(n) if n < 0 => Expr::Add(x, Box::new(Expr::Num(-n))),
                y => Expr::Sub(x, Box::new(y)),
            },
            e => e,
        }
    }

    pub fn is_simple(&self) -> bool {
        matches!(self, Expr::Num(n) if *n >= 0) || matches!(self, Expr::Var(v) if v.len() == 1)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                wrap(f, e, 3)
            }
            Expr::Add(x, y) => {
                wrap(f, x, 1)?;
                write!(f, "+")?;
                wrap(f, y, 2)
            }
            Expr::Sub(x, y) => {
                wrap(f, x, 1)?;
                write!(f, "-")?;
                wrap(f, y, 2)
            }
            Expr::Mul(x, y) => {
                if let (Expr::Num(n), Expr::Var(v)) = (&**x, &**y) {
                    return write!(f, "{n}{v}");
                }
                wrap(f, x, 2)?;
                write!(f, "*")?;
                wrap(f, y, 3)
            }
        }
    }
}

/// Recursive-descent parser over a byte slice; shared with the word parser.
pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    pub fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            pos: self.pos,
            msg: msg.into(),
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].parse().expect("digits"))
    }

    pub fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    /// expr := term (('+' | '-') term)*
    pub fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    /// term := unary ('*' unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat(b'*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    /// unary := '-' unary | number [var] | var | '(' expr ')'
    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'(') {
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        self.skip_ws();
        if let Some(n) = self.number() {
            // implicit product such as `2i`
            if let Some(v) = self.ident() {
                return Ok(Expr::Mul(Box::new(Expr::Num(n)), Box::new(Expr::Var(v.to_string()))));
            }
            return Ok(Expr::Num(n));
        }
        if let Some(v) = self.ident() {
            return Ok(Expr::Var(v.to_string()));
        }
        Err(self.error("expected a number, variable or '('"))
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut c = Cursor::new(src);
    let e = c.expr()?;
    if !c.at_end() {
        return Err(c.error("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, b: &Bindings) -> i64 {
        parse_expr(src).unwrap().eval(b).unwrap()
    }

    #[test]
    fn evaluates_index_expressions() {
        let b = Bindings::for_genus(&GenusConfig::new(26).unwrap()).with("i", 4);
        assert_eq!(eval("g-1", &b), 25);
        assert_eq!(eval("r+10", &b), 22);
        assert_eq!(eval("2i-6", &b), 2);
        assert_eq!(eval("-(2i-6)", &b), -2);
        assert_eq!(eval("6-2*i", &b), -2);
        assert_eq!(eval("nc", &b), 12);
    }

    #[test]
    fn unbound_and_malformed() {
        let b = Bindings::default();
        assert!(matches!(
            parse_expr("j+1").unwrap().eval(&b),
            Err(Error::UnboundVariable(_))
        ));
        assert!(parse_expr("1+").is_err());
        assert!(parse_expr("(2").is_err());
    }

    #[test]
    fn shift_and_display() {
        let e = parse_expr("r+3").unwrap();
        assert_eq!(e.shifted(1).to_string(), "r+4");
        assert_eq!(parse_expr("g-1").unwrap().shifted(1).to_string(), "g");
        assert_eq!(parse_expr("10").unwrap().shifted(-1).to_string(), "9");
        assert_eq!(parse_expr("2i-6").unwrap().to_string(), "2i-6");
        assert_eq!(parse_expr("-(2i-6)").unwrap().to_string(), "-(2i-6)");
    }
}
