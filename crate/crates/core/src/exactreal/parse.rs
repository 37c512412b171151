//! Recursive-descent parser for the constant grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := INT | INT '/' INT | 'sqrt(' expr ')' | '(' expr ')' | '-' factor
//! ```
//!
//! Division is left-associative; `INT/INT` is folded to a rational literal
//! only when it forms a whole quotient, so `x/3/4` means `(x/3)/4`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::expr::{ConstExpr, Node};
use super::ExactError;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> ExactError {
        ExactError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExactError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ConstExpr, ExactError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ConstExpr, ExactError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = fold_quotient(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ConstExpr, ExactError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(match inner.node() {
                    Node::Int(n) => ConstExpr::int(-n),
                    _ => -inner,
                })
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.err("bad digits"))?;
                let n: BigInt = digits.parse().map_err(|_| self.err("bad integer"))?;
                Ok(ConstExpr::int(n))
            }
            Some(b's') => {
                if self.src[self.pos..].starts_with(b"sqrt") {
                    self.pos += 4;
                    self.expect(b'(')?;
                    let e = self.expr()?;
                    self.expect(b')')?;
                    Ok(ConstExpr::sqrt(e))
                } else {
                    Err(self.err("unknown identifier"))
                }
            }
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn fold_quotient(lhs: ConstExpr, rhs: ConstExpr) -> ConstExpr {
    if let (Node::Int(p), Node::Int(q)) = (lhs.node(), rhs.node()) {
        if !q.is_zero() {
            if let Some(r) = ConstExpr::ratio(p.clone(), q.clone()) {
                return r;
            }
        }
    }
    lhs / rhs
}

/// Parses a constant expression such as `"sqrt(3)/4096"` or `"1+sqrt(2)"`.
pub fn parse_const(src: &str) -> Result<ConstExpr, ExactError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl std::str::FromStr for ConstExpr {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_const(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_examples() {
        assert_eq!(parse_const("sqrt(2)").unwrap().to_string(), "sqrt(2)");
        assert_eq!(parse_const("sqrt(3)/4096").unwrap().to_string(), "sqrt(3)/4096");
        let r = parse_const("3/64").unwrap();
        assert!(matches!(r.node(), Node::Rat(_)));
        assert_eq!(parse_const(" - 3 / 2 ").unwrap().to_string(), "-3/2");
    }

    #[test]
    fn division_is_left_associative() {
        let e = parse_const("sqrt(2)/3/4").unwrap();
        assert_eq!(e.to_string(), "sqrt(2)/3/4");
        let lit = parse_const("6/3/2").unwrap();
        assert_eq!(lit.to_string(), "1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_const("sqrt(2").is_err());
        assert!(parse_const("pi").is_err());
        assert!(parse_const("2 3").is_err());
        assert!(parse_const("").is_err());
    }
}
