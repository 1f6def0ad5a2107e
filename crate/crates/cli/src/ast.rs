//! Expression grammar for polynomials and series on the command line.
//!
//! The surface syntax is sums of products of atoms: integer literals, the
//! series variable t (rational powers allowed), polynomial variables with
//! integer powers, the extension generator g, parenthesized subexpressions,
//! and precision markers O(t^e). Division is restricted: the divisor must
//! reduce to an invertible monomial c*t^e, which covers rational literals
//! like 1/2 and forms like 1/t, and nothing with a variable or a sum in it.
//! The authoritative grammar ships in docs/grammar.ebnf.

use fiberlift_core::Exp;
use num_bigint::BigInt;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    fn new(span: Span, expected: &[&str], found: impl Into<String>) -> Self {
        ParseError {
            line: span.line,
            column: span.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" | "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    /// t, g, or a polynomial variable; classified during lowering.
    Sym(String),
    /// O(t^e): everything from exponent e on is unknown.
    Prec(Exp),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Exponent is an exact rational; lowering enforces integrality where
    /// the base demands it.
    Pow(Box<Expr>, Exp),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut column: u32 = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, column };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Int(BigInt::from_str(&digits).unwrap()), span));
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                name.push(c);
                chars.next();
                column += 1;
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        name.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(name), span));
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                chars.next();
                column += 1;
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push((tok, span));
            }
            other => {
                return Err(ParseError::new(
                    span,
                    &["a term"],
                    format!("`{other}`"),
                ));
            }
        }
    }
    out.push((Tok::End, Span { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Span) {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok, expected: &[&str]) -> Result<Span, ParseError> {
        let (tok, span) = self.peek().clone();
        if tok == *want {
            self.next();
            Ok(span)
        } else {
            Err(ParseError::new(span, expected, tok.to_string()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    let span = lhs.span;
                    lhs = Expr::new(ExprKind::Add(Box::new(lhs), Box::new(rhs)), span);
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    let span = lhs.span;
                    lhs = Expr::new(ExprKind::Sub(Box::new(lhs), Box::new(rhs)), span);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    let span = lhs.span;
                    lhs = Expr::new(ExprKind::Mul(Box::new(lhs), Box::new(rhs)), span);
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.unary()?;
                    let span = lhs.span;
                    lhs = Expr::new(ExprKind::Div(Box::new(lhs), Box::new(rhs)), span);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().0 {
            Tok::Minus => {
                let (_, span) = self.next();
                let inner = self.unary()?;
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span))
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.next();
            let e = self.exponent()?;
            let span = base.span;
            return Ok(Expr::new(ExprKind::Pow(Box::new(base), e), span));
        }
        Ok(base)
    }

    /// Integer, possibly signed; or a parenthesized signed rational.
    fn exponent(&mut self) -> Result<Exp, ParseError> {
        let (tok, span) = self.peek().clone();
        match tok {
            Tok::LParen => {
                self.next();
                let e = self.signed_rational()?;
                self.eat(&Tok::RParen, &["`)`"])?;
                Ok(e)
            }
            Tok::Minus => {
                self.next();
                let n = self.integer()?;
                Ok(Exp::from_rational((-n).into()))
            }
            Tok::Int(_) => {
                let n = self.integer()?;
                Ok(Exp::from_rational(n.into()))
            }
            other => Err(ParseError::new(
                span,
                &["an integer exponent", "`(`"],
                other.to_string(),
            )),
        }
    }

    fn signed_rational(&mut self) -> Result<Exp, ParseError> {
        let neg = if self.peek().0 == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let num = self.integer()?;
        let num = if neg { -num } else { num };
        if self.peek().0 == Tok::Slash {
            self.next();
            let (tok, span) = self.peek().clone();
            let den = self.integer()?;
            if den == BigInt::from(0) {
                return Err(ParseError::new(span, &["a nonzero denominator"], tok.to_string()));
            }
            Ok(Exp::from_rational(num_rational::BigRational::new(num, den)))
        } else {
            Ok(Exp::from_rational(num.into()))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let (tok, span) = self.next();
        match tok {
            Tok::Int(n) => Ok(n),
            other => Err(ParseError::new(span, &["an integer"], other.to_string())),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, span) = self.peek().clone();
        match tok {
            Tok::Int(_) => {
                let n = self.integer()?;
                Ok(Expr::new(ExprKind::Int(n), span))
            }
            Tok::Ident(name) if name == "O" => {
                self.next();
                self.eat(&Tok::LParen, &["`(`"])?;
                let e = self.o_argument()?;
                self.eat(&Tok::RParen, &["`)`"])?;
                Ok(Expr::new(ExprKind::Prec(e), span))
            }
            Tok::Ident(name) => {
                self.next();
                Ok(Expr::new(ExprKind::Sym(name), span))
            }
            Tok::LParen => {
                self.next();
                let inner = self.expr()?;
                self.eat(&Tok::RParen, &["`)`"])?;
                Ok(inner)
            }
            other => Err(ParseError::new(
                span,
                &["a number", "a variable", "`t`", "`(`"],
                other.to_string(),
            )),
        }
    }

    /// Inside O(...): `1`, `t`, or `t^exponent`.
    fn o_argument(&mut self) -> Result<Exp, ParseError> {
        let (tok, span) = self.peek().clone();
        match tok {
            Tok::Int(n) if n == BigInt::from(1) => {
                self.next();
                Ok(Exp::zero())
            }
            Tok::Ident(name) if name == "t" => {
                self.next();
                if self.peek().0 == Tok::Caret {
                    self.next();
                    self.exponent()
                } else {
                    Ok(Exp::one())
                }
            }
            other => Err(ParseError::new(
                span,
                &["`t`", "`t^e`", "`1`"],
                other.to_string(),
            )),
        }
    }
}

/// Parse a complete expression; trailing input is an error.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    let (tok, span) = p.peek().clone();
    if tok != Tok::End {
        return Err(ParseError::new(span, &["end of input"], tok.to_string()));
    }
    Ok(e)
}
