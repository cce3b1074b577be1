//! Recursive-descent parser for metric scale expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' integer)?
//! base   := number | 'alpha' | 'a' | 'sin' '(' expr ')' | 'cos' '(' expr ')'
//!         | '(' expr ')' | '-' base
//! ```
//!
//! Whitespace is insignificant. Numbers are decimal literals.

use super::expr::PeriodicExpr;
use crate::error::{Error, Result};

pub fn parse_expr(src: &str) -> Result<PeriodicExpr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn error(&mut self, expected: &[&str]) -> Error {
        self.skip_ws();
        let found = match self.rest().chars().next() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        Error::Parse {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("'{c}'")]))
        }
    }

    fn expr(&mut self) -> Result<PeriodicExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs.add(self.term()?);
            } else if self.eat('-') {
                lhs = lhs.sub(self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<PeriodicExpr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = lhs.mul(self.factor()?);
            } else if self.peek() == Some('/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.factor()?;
                lhs = lhs.try_div(rhs).map_err(|_| Error::Parse {
                    offset: at,
                    expected: vec!["nonzero denominator".into()],
                    found: "constant zero".into(),
                })?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<PeriodicExpr> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let start = self.pos;
        let neg = self.eat('-');
        self.skip_ws();
        let digits: &str = {
            let r = self.rest();
            let n = r.bytes().take_while(u8::is_ascii_digit).count();
            &r[..n]
        };
        if digits.is_empty() {
            return Err(self.error(&["integer exponent"]));
        }
        self.pos += digits.len();
        let mut n: i32 = digits.parse().map_err(|_| Error::Parse {
            offset: start,
            expected: vec!["integer exponent".into()],
            found: digits.to_string(),
        })?;
        if neg {
            n = -n;
        }
        base.powi(n).map_err(|_| Error::Parse {
            offset: start,
            expected: vec!["nonnegative exponent of zero".into()],
            found: format!("{n}"),
        })
    }

    fn base(&mut self) -> Result<PeriodicExpr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.base()?.neg())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let word: &str = {
                    let r = self.rest();
                    let n = r
                        .bytes()
                        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                        .count();
                    &r[..n]
                };
                match word {
                    "alpha" => {
                        self.pos += word.len();
                        Ok(PeriodicExpr::alpha())
                    }
                    "a" => {
                        self.pos += word.len();
                        Ok(PeriodicExpr::param())
                    }
                    "sin" | "cos" => {
                        self.pos += word.len();
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(if word == "sin" { arg.sin() } else { arg.cos() })
                    }
                    _ => Err(self.error(BASE_START)),
                }
            }
            _ => Err(self.error(BASE_START)),
        }
    }

    fn number(&mut self) -> Result<PeriodicExpr> {
        let r = self.rest();
        let int = r.bytes().take_while(u8::is_ascii_digit).count();
        let mut len = int;
        if r[len..].starts_with('.') {
            len += 1;
            len += r[len..].bytes().take_while(u8::is_ascii_digit).count();
        }
        if len == 1 && int == 0 {
            return Err(self.error(&["digit"]));
        }
        let text = &r[..len];
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            offset: self.pos,
            expected: vec!["decimal literal".into()],
            found: text.to_string(),
        })?;
        self.pos += len;
        Ok(PeriodicExpr::constant(v))
    }
}

const BASE_START: &[&str] = &["number", "'alpha'", "'a'", "'sin'", "'cos'", "'('", "'-'"];

#[cfg(test)]
mod tests {
    use super::*;

    fn val(src: &str, x: f64, a: i64) -> f64 {
        parse_expr(src).unwrap().eval(x, a).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(val("1 + 2 * 3", 0.0, 0), 7.0);
        assert_eq!(val("8 / 4 / 2", 0.0, 0), 1.0);
        assert_eq!(val("10 - 4 - 3", 0.0, 0), 3.0);
        assert_eq!(val("2 * 3 ^ 2", 0.0, 0), 18.0);
        assert_eq!(val("-2 ^ 2", 0.0, 0), 4.0);
        assert_eq!(val("(1 + 1) ^ -1", 0.0, 0), 0.5);
    }

    #[test]
    fn variables_and_functions() {
        let x = 0.37;
        assert!((val("sin(alpha)", x, 0) - x.sin()).abs() < 1e-15);
        assert!((val("cos(a*alpha)", x, 3) - (3.0 * x).cos()).abs() < 1e-15);
        assert!((val(" 2 - cos( 2 * alpha ) ", x, 0) - (2.0 - (2.0 * x).cos())).abs() < 1e-15);
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(val("0.25", 0.0, 0), 0.25);
        assert_eq!(val(".5", 0.0, 0), 0.5);
        assert_eq!(val("3.", 0.0, 0), 3.0);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        match parse_expr("sin(alpha") {
            Err(Error::Parse { offset, expected, .. }) => {
                assert_eq!(offset, 9);
                assert_eq!(expected, vec!["')'".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn junk_is_rejected() {
        assert!(matches!(parse_expr("tan(alpha)"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse_expr("1 +"), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse_expr("1 2"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_expr("alpha^x"), Err(Error::Parse { offset: 6, .. })));
        assert!(matches!(parse_expr("1/(3-3)"), Err(Error::Parse { offset: 1, .. })));
    }
}
