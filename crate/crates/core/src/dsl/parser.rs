//! Recursive-descent parser for surface expressions and surface files.
//!
//! Expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? INTEGER)?
//! primary := NUMBER | 'u' | 'v' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//! ```

use crate::error::{Error, Result};

use super::expr::{Expr, Func};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn tokenize(src: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| Error::Syntax {
                line,
                column: col,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(value, text),
                col,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Op(c), col });
            i += 1;
        } else {
            return Err(Error::Syntax {
                line,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        col: col0 + chars.len(),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, tok: &Token, expected: &str) -> Error {
        let found = match &tok.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(_, s) => format!("`{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
        };
        Error::Syntax {
            line: self.line,
            column: tok.col,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek().tok == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        let tok = self.bump();
        match &tok.tok {
            Tok::Num(x, text) if x.fract() == 0.0 && !text.contains(['.', 'e', 'E']) => {
                if *x > i32::MAX as f64 {
                    return Err(self.error(&tok, "a small integer exponent"));
                }
                let n = *x as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => Err(self.error(&tok, "an integer exponent")),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = self.bump();
        match &tok.tok {
            Tok::Num(x, _) => Ok(Expr::Num(*x)),
            Tok::Ident(name) => match name.as_str() {
                "u" => Ok(Expr::u()),
                "v" => Ok(Expr::v()),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                _ => match Func::from_name(name) {
                    Some(f) => {
                        let open = self.bump();
                        if open.tok != Tok::Op('(') {
                            return Err(self.error(&open, "`(`"));
                        }
                        let arg = self.expr()?;
                        let close = self.bump();
                        if close.tok != Tok::Op(')') {
                            return Err(self.error(&close, "`)`"));
                        }
                        Ok(Expr::call(f, arg))
                    }
                    None => Err(Error::UnknownIdentifier {
                        name: name.clone(),
                        line: self.line,
                        column: tok.col,
                    }),
                },
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::Op(')') {
                    return Err(self.error(&close, "`)`"));
                }
                Ok(e)
            }
            _ => Err(self.error(&tok, "a number, `u`, `v`, a function call or `(`")),
        }
    }
}

/// Parses one expression; `line` and `col0` locate it for error messages.
pub(crate) fn parse_expr_at(src: &str, line: usize, col0: usize) -> Result<Expr> {
    let toks = tokenize(src, line, col0)?;
    let mut p = Parser { toks, pos: 0, line };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.error(&t, "an operator or end of input"));
    }
    Ok(e)
}

/// Parses a single expression in `u`, `v`.
pub fn parse_expr(src: &str) -> Result<Expr> {
    parse_expr_at(src, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_product_of_sum_and_call() {
        let e = parse_expr("(1+v^2)*cos(u)").unwrap();
        let expect = Expr::Mul(
            Box::new(Expr::Add(
                Box::new(Expr::Num(1.0)),
                Box::new(Expr::pow(Expr::v(), 2)),
            )),
            Box::new(Expr::call(Func::Cos, Expr::u())),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn dangling_operator_reports_end_of_input() {
        match parse_expr("u +") {
            Err(Error::Syntax { column, message, .. }) => {
                assert_eq!(column, 4);
                assert!(message.contains("end of input"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        assert!(matches!(
            parse_expr("tan(u)"),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(parse_expr("u*w"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn fractional_exponent_rejected() {
        assert!(matches!(parse_expr("u^1.5"), Err(Error::Syntax { .. })));
        assert_eq!(parse_expr("u^-2").unwrap(), Expr::pow(Expr::u(), -2));
    }

    #[test]
    fn unary_minus_binds_below_power() {
        assert_eq!(
            parse_expr("-v^2").unwrap(),
            Expr::Neg(Box::new(Expr::pow(Expr::v(), 2)))
        );
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse_expr("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse_expr("2E2*u").unwrap().eval(1.0, 0.0), 200.0);
    }
}
