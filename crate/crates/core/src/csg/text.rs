//! S-expression program text: `(union (circle 4 8 4) (rect 7 7 15 9))`.

use std::fmt;
use std::str::FromStr;

use super::expr::Expr;
use crate::error::{Error, Result};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Circle { x, y, r } => write!(f, "(circle {x} {y} {r})"),
            Expr::Rect { x1, y1, x2, y2 } => write!(f, "(rect {x1} {y1} {x2} {y2})"),
            Expr::Union(a, b) => write!(f, "(union {a} {b})"),
            Expr::Diff(a, b) => write!(f, "(diff {a} {b})"),
            Expr::Repeat { body, dx, dy, count } => write!(f, "(repeat {body} {dx} {dy} {count})"),
        }
    }
}

pub fn serialize(e: &Expr) -> String {
    e.to_string()
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input after program"));
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(got) if got == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(got) => Err(self.error(format!("expected {c:?}, found {got:?}"))),
            None => Err(self.error(format!("expected {c:?}, found end of input"))),
        }
    }

    fn token(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn int(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        let tok = self.token();
        if tok.is_empty() {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        tok.parse().map_err(|_| {
            let msg = format!("invalid integer {tok:?}");
            Error::Parse { pos: start, msg }
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        self.expect('(')?;
        self.skip_ws();
        let head_pos = self.pos;
        let head = self.token().to_string();
        let e = match head.as_str() {
            "circle" => Expr::circle(self.int()?, self.int()?, self.int()?),
            "rect" => Expr::rect(self.int()?, self.int()?, self.int()?, self.int()?),
            "union" => Expr::union(self.expr()?, self.expr()?),
            "diff" => Expr::diff(self.expr()?, self.expr()?),
            "repeat" => {
                let body = self.expr()?;
                Expr::repeat(body, self.int()?, self.int()?, self.int()?)
            }
            "" => return Err(Error::Parse { pos: head_pos, msg: "missing operator".into() }),
            other => {
                let msg = format!("unknown operator {other:?}");
                return Err(Error::Parse { pos: head_pos, msg });
            }
        };
        self.expect(')')?;
        Ok(e)
    }
}
