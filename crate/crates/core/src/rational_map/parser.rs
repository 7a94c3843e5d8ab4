//! Recursive-descent parser for the map grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' uint)?
//! atom   := uint | 'x' | 'y' | 'x0' | 'y0' | '(' expr ')' | '-' factor
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use super::{RationalMapExpr, Var};
use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<RationalMapExpr> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<RationalMapExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = RationalMapExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = RationalMapExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RationalMapExpr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = RationalMapExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = RationalMapExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalMapExpr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let start = self.pos;
            let digits = self.digits();
            let exp = digits.parse::<u32>().map_err(|_| Error::Syntax {
                offset: start,
                message: "exponent too large".to_string(),
            })?;
            return Ok(RationalMapExpr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<RationalMapExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let digits = self.digits();
                let value = digits.parse::<u64>().map_err(|_| Error::Syntax {
                    offset: start,
                    message: "integer literal too large".to_string(),
                })?;
                Ok(RationalMapExpr::Const(value))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                Var::from_name(&name)
                    .map(RationalMapExpr::Var)
                    .ok_or(Error::UnknownIdentifier {
                        offset: start,
                        name,
                    })
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(RationalMapExpr::Neg(Box::new(self.factor()?)))
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }
}
