//! Element expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | atom ("^" ["-"] integer)?
//! atom   := integer | "p" | "pi" | "zeta" | "u" | "(" expr ")"
//! ```
//!
//! Unary minus and `u`, the generator of the unramified part, extend the
//! basic grammar. Values live in `O_K[1/p]`; domain checks are left to the
//! caller.

use std::fmt;

use num_bigint::BigInt;

use rlab_core::{Error, Field, KElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Parsed expression. `Int` holds the nonnegative literals the parser
/// produces; negation is always `Neg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    P,
    Pi,
    Zeta,
    U,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based column of the offending character.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Int(text.parse().expect("digits")), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if !matches!(word.as_str(), "p" | "pi" | "zeta" | "u") {
                return Err(ParseError { column: col, message: format!("unknown token {word:?}") });
            }
            out.push((Tok::Ident(word), col));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(ParseError { column: col, message: format!("unknown token {c:?}") }),
            };
            out.push((tok, col));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.column(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let negative = matches!(self.peek(), Some(Tok::Op('-')));
            if negative {
                self.pos += 1;
            }
            let Some(Tok::Int(k)) = self.peek().cloned() else {
                return self.fail("expected an integer exponent");
            };
            let Ok(k) = i64::try_from(if negative { -k } else { k }) else {
                return self.fail("exponent out of range");
            };
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of input");
        };
        let out = match tok {
            Tok::Int(v) => Expr::Int(v),
            Tok::Ident(w) => match w.as_str() {
                "p" => Expr::P,
                "pi" => Expr::Pi,
                "zeta" => Expr::Zeta,
                _ => Expr::U,
            },
            Tok::LParen => {
                let open = self.column();
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ParseError { column: open, message: "unbalanced parenthesis".into() });
                }
                inner
            }
            Tok::RParen => return self.fail("unbalanced parenthesis"),
            Tok::Op(c) => return self.fail(format!("unexpected operator {c:?}")),
        };
        self.pos += 1;
        Ok(out)
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let end = src.chars().count() + 1;
    let mut parser = Parser { toks, pos: 0, end };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some(Tok::RParen) => parser.fail("unbalanced parenthesis"),
        Some(_) => parser.fail("unexpected token"),
    }
}

impl Expr {
    fn is_atom(&self) -> bool {
        matches!(self, Expr::Int(_) | Expr::P | Expr::Pi | Expr::Zeta | Expr::U)
    }
}

/// Prints with the fewest parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) if v.sign() == num_bigint::Sign::Minus => write!(f, "({v})"),
            Expr::Int(v) => write!(f, "{v}"),
            Expr::P => f.write_str("p"),
            Expr::Pi => f.write_str("pi"),
            Expr::Zeta => f.write_str("zeta"),
            Expr::U => f.write_str("u"),
            Expr::Neg(x) => match **x {
                Expr::Bin(..) => write!(f, "-({x})"),
                _ => write!(f, "-{x}"),
            },
            Expr::Pow(x, k) if x.is_atom() => write!(f, "{x}^{k}"),
            Expr::Pow(x, k) => write!(f, "({x})^{k}"),
            Expr::Bin(op, l, r) => {
                let prec = op.precedence();
                let wrap = |e: &Expr, strict: bool| match e {
                    Expr::Bin(o, ..) => o.precedence() < prec || (strict && o.precedence() == prec),
                    // a leading minus on a right operand would read as a binary minus
                    Expr::Neg(_) => strict,
                    _ => false,
                };
                if wrap(l, false) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if wrap(r, true) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

/// Evaluates in `field` at its working precision.
pub fn eval(expr: &Expr, field: &Field) -> Result<KElement, Error> {
    Ok(match expr {
        Expr::Int(v) => field.int(v.clone()),
        Expr::P => field.int(field.p()),
        Expr::Pi => field.pi(),
        Expr::Zeta => field.zeta()?,
        Expr::U => field.unram_gen(),
        Expr::Neg(x) => -eval(x, field)?,
        Expr::Pow(x, k) => eval(x, field)?.pow(*k)?,
        Expr::Bin(op, l, r) => {
            let (a, b) = (eval(l, field)?, eval(r, field)?);
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => &a * &b,
                BinOp::Div => a.div(&b)?,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rlab_core::{make_field, FieldDesc};

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    #[test]
    fn evaluates_examples() {
        let k = f0();
        assert_eq!(eval(&parse_expr("1+p").unwrap(), &k).unwrap(), k.int(4));
        let z = k.zeta().unwrap();
        assert_eq!(eval(&parse_expr("zeta^2*pi").unwrap(), &k).unwrap(), &z.square() * &k.pi());
        assert_eq!(eval(&parse_expr("1/(1-p)").unwrap(), &k).unwrap(), k.int(-2).inv().unwrap());
        assert_eq!(eval(&parse_expr("-pi^2").unwrap(), &k).unwrap(), -&k.pi().square());
        assert_eq!(eval(&parse_expr("pi^-1 * pi").unwrap(), &k).unwrap(), k.one());
    }

    #[test]
    fn reports_columns() {
        assert_eq!(parse_expr("1+*p").unwrap_err().column, 3);
        let e = parse_expr("(1+p").unwrap_err();
        assert_eq!((e.column, e.message.as_str()), (1, "unbalanced parenthesis"));
        assert_eq!(parse_expr("1+p)").unwrap_err().column, 4);
        assert_eq!(parse_expr("2*x").unwrap_err().column, 3);
        assert_eq!(parse_expr("zeta^").unwrap_err().column, 6);
        assert_eq!(parse_expr("").unwrap_err().column, 1);
    }

    #[test]
    fn prints_minimal_parentheses() {
        for (src, printed) in [
            ("1+p", "1 + p"),
            ("(1-p)-(pi-2)", "1 - p - (pi - 2)"),
            ("-(1+p)*zeta^2", "-(1 + p) * zeta^2"),
            ("(pi+1)^-3", "(pi + 1)^-3"),
            ("1 - -p", "1 - (-p)"),
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), printed);
            assert_eq!(parse_expr(printed).unwrap(), e);
        }
    }
}
