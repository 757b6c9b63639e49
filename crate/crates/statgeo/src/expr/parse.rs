//! Recursive-descent parser for the coordinate expression language.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?          // right-associative
//! atom   := number | ident '(' expr ')' | coordinate | '(' expr ')'
//! ```
//!
//! so `*`/`/` bind tighter than `+`/`-`, `^` binds tighter than unary minus
//! (`-x^2` is `-(x^2)`), and `2^3^2` is `2^(3^2)`.  All errors carry byte
//! offsets into the source.

use super::{Expr, Func};
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_whitespace() {
                lx.pos += 1;
            }
            if lx.pos >= lx.src.len() {
                break;
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' | b'.' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while lx.pos < lx.src.len()
                        && (lx.src[lx.pos].is_ascii_alphanumeric() || lx.src[lx.pos] == b'_')
                    {
                        lx.pos += 1;
                    }
                    Tok::Ident(std::str::from_utf8(&lx.src[start..lx.pos]).unwrap().to_owned())
                }
                other => {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected character `{}`", other as char),
                    })
                }
            };
            out.push((start, tok));
        }
        Ok(out)
    }

    fn number(&mut self, start: usize) -> Result<Tok> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // Optional exponent: e or E, optional sign, digits.
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Tok::Num(v)),
            Ok(_) => Err(Error::Syntax {
                offset: start,
                message: format!("number literal `{text}` overflows f64"),
            }),
            Err(_) => Err(Error::Syntax {
                offset: start,
                message: format!("malformed number literal `{text}`"),
            }),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Offset to blame when the input ends too early.
    fn here(&self) -> usize {
        self.peek().map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some((_, tok)) = self.peek() {
            let sub = match tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if sub {
                Expr::sub(lhs, rhs)
            } else {
                Expr::add(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some((_, tok)) = self.peek() {
            let div = match tok {
                Tok::Star => false,
                Tok::Slash => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = if div {
                Expr::div(lhs, rhs)
            } else {
                Expr::mul(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some((_, Tok::Minus))) {
            self.pos += 1;
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some((_, Tok::Caret))) {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.here();
        match self.bump() {
            Some((_, Tok::Num(v))) => Ok(Expr::Const(v)),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((o, _)) => Err(Error::Syntax {
                        offset: o,
                        message: "expected `)`".into(),
                    }),
                    None => Err(Error::Syntax {
                        offset: self.end,
                        message: "unclosed `(`".into(),
                    }),
                }
            }
            Some((o, Tok::Ident(name))) => self.ident(o, name),
            Some((o, tok)) => Err(Error::Syntax {
                offset: o,
                message: format!("expected expression, found `{tok:?}`"),
            }),
            None => Err(Error::Syntax {
                offset: offset,
                message: "expected expression, found end of input".into(),
            }),
        }
    }

    fn ident(&mut self, offset: usize, name: String) -> Result<Expr> {
        // Coordinates: `x` followed only by digits.
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| Error::Syntax {
                    offset,
                    message: format!("coordinate index `{digits}` too large"),
                })?;
                if index == 0 || index > self.dim {
                    return Err(Error::CoordOutOfRange {
                        index,
                        dim: self.dim,
                    });
                }
                return Ok(Expr::Coord(index - 1));
            }
        }
        if let Some(func) = Func::from_name(&name) {
            return match self.bump() {
                Some((_, Tok::LParen)) => {
                    let arg = self.expr()?;
                    match self.bump() {
                        Some((_, Tok::RParen)) => Ok(Expr::call(func, arg)),
                        Some((o, _)) => Err(Error::Syntax {
                            offset: o,
                            message: format!("expected `)` closing `{name}(`"),
                        }),
                        None => Err(Error::Syntax {
                            offset: self.end,
                            message: format!("unclosed `{name}(`"),
                        }),
                    }
                }
                _ => Err(Error::Syntax {
                    offset,
                    message: format!("function `{name}` must be called as `{name}(...)`"),
                }),
            };
        }
        Err(Error::UnknownIdentifier { offset, name })
    }
}

/// Parse `src` as an expression over coordinates `x1..x{dim}`.
pub fn parse(src: &str, dim: usize) -> Result<Expr> {
    let toks = Lexer::tokenize(src)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: src.len(),
        dim,
    };
    let e = parser.expr()?;
    if let Some((offset, tok)) = parser.peek() {
        return Err(Error::Syntax {
            offset: *offset,
            message: format!("unexpected trailing `{tok:?}`"),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse("x1+x2", 2).unwrap(), parse("  x1 \t+\n x2 ", 2).unwrap());
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1e-3", 1).unwrap(), Expr::Const(1e-3));
        assert_eq!(parse("2.5E2", 1).unwrap(), Expr::Const(250.0));
        // `e` not followed by digits is not an exponent.
        assert!(matches!(
            parse("2e", 1),
            Err(Error::UnknownIdentifier { .. }) | Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn trailing_garbage_is_an_error() {
        match parse("x1 x2", 2) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn function_requires_parentheses() {
        assert!(matches!(parse("sin x1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("sin(x1", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn x0_is_out_of_range() {
        assert!(matches!(
            parse("x0", 3),
            Err(Error::CoordOutOfRange { index: 0, dim: 3 })
        ));
    }

    #[test]
    fn double_negation_parses() {
        assert_eq!(parse("--x1", 1).unwrap(), Expr::Coord(0));
        assert_eq!(parse("2 - -3", 1).unwrap(), Expr::Const(5.0));
    }
}
