//! Metric-component expressions: parsing, printing and evaluation.
//!
//! Grammar (whitespace ignored between tokens):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | power
//! power   := primary ("^" unary)?
//! primary := number | ident | ident "(" expr ")" | "(" expr ")"
//! number  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//! ```
//!
//! `^` binds tighter than unary minus (`-x0^2 = -(x0^2)`) and is right
//! associative. Identifiers are coordinates (`x0`..`x3` or a chart alias),
//! parameters, the constant `pi`, or one of the functions
//! `sin cos exp log sinh cosh sqrt`. Multiplication is always explicit.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jets::{integer_exponent, Elementary, Jet3, JetError, DIM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("empty expression")]
    Empty,
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => Some(*offset),
            ParseError::Empty => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Names an expression may refer to.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolTable {
    /// Chart aliases of the four coordinates, e.g. `t r theta phi`.
    pub coords: Vec<String>,
    pub params: Vec<String>,
}

impl SymbolTable {
    pub fn new<S: AsRef<str>>(coords: &[S], params: &[S]) -> Self {
        SymbolTable {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            params: params.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    fn coordinate(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.coords.iter().position(|c| c == name) {
            return Some(i);
        }
        match name {
            "x0" => Some(0),
            "x1" => Some(1),
            "x2" => Some(2),
            "x3" => Some(3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression tree. The right operand of [`BinOp::Pow`] never depends on a
/// coordinate; the parser rewrites such powers as `exp(b*log(a))`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Coord(usize),
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Elementary, Box<Expr>),
}

/// Scalars an [`Expr`] can be evaluated over.
pub trait Scalar: Sized + Clone {
    fn constant(c: f64) -> Self;
    fn coordinate(axis: usize, at: f64) -> Self;
    fn value(&self) -> f64;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self, JetError>;
    fn apply(&self, f: Elementary) -> Result<Self, JetError>;
    fn pow(&self, exponent: f64) -> Result<Self, JetError>;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn coordinate(_: usize, at: f64) -> Self {
        at
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, rhs: &Self) -> Result<Self, JetError> {
        if *rhs == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn apply(&self, f: Elementary) -> Result<Self, JetError> {
        f.eval(*self)
    }
    fn pow(&self, exponent: f64) -> Result<Self, JetError> {
        match integer_exponent(exponent) {
            Some(n) if n < 0 && *self == 0.0 => Err(JetError::DivisionByZero),
            Some(n) => Ok(self.powi(n)),
            None if *self > 0.0 => Ok(self.powf(exponent)),
            None => Err(JetError::Domain { func: "pow", value: *self }),
        }
    }
}

impl Scalar for Jet3 {
    fn constant(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn coordinate(axis: usize, at: f64) -> Self {
        Jet3::var(axis, at).expect("axis checked by parser")
    }
    fn value(&self) -> f64 {
        Jet3::value(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn div(&self, rhs: &Self) -> Result<Self, JetError> {
        self.checked_div(rhs)
    }
    fn apply(&self, f: Elementary) -> Result<Self, JetError> {
        self.compose(f)
    }
    fn pow(&self, exponent: f64) -> Result<Self, JetError> {
        if integer_exponent(exponent).is_none() && self.value() <= 0.0 {
            return Err(JetError::Domain { func: "pow", value: self.value() });
        }
        self.powf(exponent)
    }
}

pub type Params = BTreeMap<String, f64>;

impl Expr {
    pub fn parse(text: &str, symbols: &SymbolTable) -> Result<Expr, ParseError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut p = Parser { tokens, pos: 0, symbols, end: text.len() };
        let e = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(ParseError::Syntax { offset: t.offset, message: format!("unexpected {}", t.kind) });
        }
        Ok(e)
    }

    pub fn number(x: f64) -> Expr {
        Expr::Number(x)
    }

    /// True when the expression contains no coordinate reference.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Number(_) | Expr::Param(_) => true,
            Expr::Coord(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Evaluates over any [`Scalar`]; coordinates enter through [`Scalar::coordinate`].
    pub fn eval<S: Scalar>(&self, point: &[f64; DIM], params: &Params) -> Result<S, EvalError> {
        Ok(match self {
            Expr::Number(x) => S::constant(*x),
            Expr::Coord(i) => S::coordinate(*i, point[*i]),
            Expr::Param(name) => S::constant(*params.get(name).ok_or_else(|| EvalError::Unbound(name.clone()))?),
            Expr::Neg(a) => a.eval::<S>(point, params)?.neg(),
            Expr::Call(f, a) => a.eval::<S>(point, params)?.apply(*f)?,
            Expr::Binary(BinOp::Pow, a, b) => {
                let exponent: f64 = b.eval(point, params)?;
                a.eval::<S>(point, params)?.pow(exponent)?
            }
            Expr::Binary(op, a, b) => {
                let (x, y) = (a.eval::<S>(point, params)?, b.eval::<S>(point, params)?);
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => x.div(&y)?,
                    BinOp::Pow => unreachable!(),
                }
            }
        })
    }

    pub fn eval_real(&self, point: &[f64; DIM], params: &Params) -> Result<f64, EvalError> {
        self.eval(point, params)
    }

    pub fn eval_jet(&self, point: &[f64; DIM], params: &Params) -> Result<Jet3, EvalError> {
        self.eval(point, params)
    }

    /// Text that reparses (against the same symbol table) to an expression with
    /// identical evaluation. Coordinates print under their chart alias when one exists.
    pub fn to_text(&self, symbols: &SymbolTable) -> String {
        let mut out = String::new();
        self.write(&mut out, symbols);
        out
    }

    fn write(&self, out: &mut String, symbols: &SymbolTable) {
        match self {
            Expr::Number(x) if *x < 0.0 || (*x == 0.0 && x.is_sign_negative()) => {
                out.push_str(&format!("(-{:?})", -x));
            }
            Expr::Number(x) => out.push_str(&format!("{x:?}")),
            Expr::Coord(i) => match symbols.coords.get(*i) {
                Some(name) => out.push_str(name),
                None => out.push_str(&format!("x{i}")),
            },
            Expr::Param(name) => out.push_str(name),
            Expr::Neg(a) => {
                out.push_str("(-");
                a.write(out, symbols);
                out.push(')');
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, symbols);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                out.push('(');
                a.write(out, symbols);
                out.push(op.symbol());
                b.write(out, symbols);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&SymbolTable::default()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Number(x) => write!(f, "number {x}"),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Op(c) => write!(f, "`{c}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                tokens.push(Token { kind: TokenKind::Op(c as char), offset: start });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { kind: TokenKind::LParen, offset: start });
                i += 1;
            }
            b')' => {
                tokens.push(Token { kind: TokenKind::RParen, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let value: f64 =
                    lexeme.parse().map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{lexeme}`") })?;
                tokens.push(Token { kind: TokenKind::Number(value), offset: start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token { kind: TokenKind::Ident(text[start..i].to_string()), offset: start });
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    symbols: &'a SymbolTable,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokenKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = self.unary()?;
        if exponent.is_constant() {
            Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            let log = Expr::Call(Elementary::Log, Box::new(base));
            Ok(Expr::Call(Elementary::Exp, Box::new(Expr::Binary(BinOp::Mul, Box::new(exponent), Box::new(log)))))
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next() else {
            return Err(ParseError::Syntax { offset: self.end, message: "unexpected end of input".into() });
        };
        match tok.kind {
            TokenKind::Number(x) => Ok(Expr::Number(x)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen(tok.offset)?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                if let Some(TokenKind::LParen) = self.peek().map(|t| &t.kind) {
                    let Some(f) = Elementary::from_name(&name) else {
                        return Err(ParseError::UnknownIdentifier { name, offset: tok.offset });
                    };
                    let open = self.next().map(|t| t.offset).unwrap_or(tok.offset);
                    let arg = self.expr()?;
                    self.expect_rparen(open)?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if let Some(i) = self.symbols.coordinate(&name) {
                    Ok(Expr::Coord(i))
                } else if self.symbols.params.contains(&name) {
                    Ok(Expr::Param(name))
                } else if name == "pi" {
                    Ok(Expr::Number(std::f64::consts::PI))
                } else if Elementary::from_name(&name).is_some() {
                    Err(ParseError::Syntax { offset: tok.offset, message: format!("function `{name}` needs an argument") })
                } else {
                    Err(ParseError::UnknownIdentifier { name, offset: tok.offset })
                }
            }
            other => Err(ParseError::Syntax { offset: tok.offset, message: format!("unexpected {other}") }),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        match self.next() {
            Some(Token { kind: TokenKind::RParen, .. }) => Ok(()),
            Some(t) => Err(ParseError::Syntax { offset: t.offset, message: format!("expected `)`, found {}", t.kind) }),
            None => Err(ParseError::Syntax { offset: self.end, message: format!("unclosed `(` opened at byte {open}") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::MultiIndex;

    fn table() -> SymbolTable {
        SymbolTable::new(&["t", "r", "theta", "phi"], &["m", "H"])
    }

    fn params() -> Params {
        Params::from([("m".to_string(), 1.0), ("H".to_string(), 1.0)])
    }

    fn real(text: &str, point: [f64; 4]) -> f64 {
        Expr::parse(text, &table()).unwrap().eval_real(&point, &params()).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(real("2+3*x1", [0.0, 4.0, 0.0, 0.0]), 14.0);
        assert_eq!(real("-(x0)^2", [2.0, 0.0, 0.0, 0.0]), -4.0);
        assert_eq!(real("-x0^2", [2.0, 0.0, 0.0, 0.0]), -4.0);
        assert_eq!(real("2^3^2", [0.0; 4]), 512.0);
        assert_eq!(real("8/4/2", [0.0; 4]), 1.0);
        assert_eq!(real("8-4-2", [0.0; 4]), 2.0);
        assert_eq!(real("x1^-2", [0.0, 2.0, 0.0, 0.0]), 0.25);
        assert_eq!(real("2*pi", [0.0; 4]), 2.0 * std::f64::consts::PI);
        assert_eq!(real("1.5e2 + 2E-1", [0.0; 4]), 150.2);
    }

    #[test]
    fn real_examples() {
        assert_eq!(real("sin(x0)", [0.0; 4]), 0.0);
        assert_eq!(real("x2*x3 + 1", [0.0, 0.0, 2.0, 5.0]), 11.0);
        assert_eq!(real("r*sin(theta)", [0.0, 2.0, std::f64::consts::FRAC_PI_2, 0.0]), 2.0);
    }

    #[test]
    fn exp_derivative() {
        let e = Expr::parse("exp(2*H*x0)", &table()).unwrap();
        let j = e.eval_jet(&[0.0; 4], &params()).unwrap();
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.d1(0), 2.0);
    }

    #[test]
    fn jet_examples() {
        let sq = Expr::parse("x1^2", &table()).unwrap().eval_jet(&[0.0, 3.0, 0.0, 0.0], &params()).unwrap();
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.d1(1), 6.0);
        assert_eq!(sq.partial(&MultiIndex([0, 2, 0, 0])).unwrap(), 2.0);

        let f = Expr::parse("1 - 2*m/x1", &table()).unwrap().eval_jet(&[0.0, 10.0, 0.0, 0.0], &params()).unwrap();
        assert!((f.value() - 0.8).abs() < 1e-15);
        assert!((f.d1(1) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn coordinate_power_rewritten() {
        let e = Expr::parse("x1^x0", &table()).unwrap();
        assert!(matches!(e, Expr::Call(Elementary::Exp, _)));
        assert!((e.eval_real(&[2.0, 3.0, 0.0, 0.0], &params()).unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let t = table();
        let err = Expr::parse("2 + * 3", &t).unwrap_err();
        assert_eq!(err.offset(), Some(4));
        let err = Expr::parse("sin(x0", &t).unwrap_err();
        assert_eq!(err.offset(), Some(6));
        let err = Expr::parse("2 $ 3", &t).unwrap_err();
        assert_eq!(err.offset(), Some(2));
        let err = Expr::parse("2x", &t).unwrap_err();
        assert_eq!(err.offset(), Some(1));
        assert_eq!(Expr::parse("   ", &t), Err(ParseError::Empty));
        assert_eq!(Expr::parse("(1))", &t).unwrap_err().offset(), Some(3));
    }

    #[test]
    fn unknown_identifier_named() {
        let err = Expr::parse("1 + q*r", &table()).unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { name: "q".into(), offset: 4 });
        let err = Expr::parse("tan(r)", &table()).unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { name: "tan".into(), offset: 0 });
    }

    #[test]
    fn unbound_parameter() {
        let e = Expr::parse("m*r", &table()).unwrap();
        let err = e.eval_real(&[0.0, 1.0, 0.0, 0.0], &Params::new()).unwrap_err();
        assert_eq!(err, EvalError::Unbound("m".into()));
    }

    #[test]
    fn domain_errors_match_between_real_and_jet() {
        let e = Expr::parse("sqrt(x1)", &table()).unwrap();
        let p = [0.0, -1.0, 0.0, 0.0];
        assert!(e.eval_real(&p, &params()).is_err());
        assert!(e.eval_jet(&p, &params()).is_err());
        let e = Expr::parse("1/(x1-2)", &table()).unwrap();
        let p = [0.0, 2.0, 0.0, 0.0];
        assert!(e.eval_real(&p, &params()).is_err());
        assert!(e.eval_jet(&p, &params()).is_err());
    }

    #[test]
    fn printing_uses_aliases() {
        let t = table();
        let e = Expr::parse("-2*m/r + x2^0.5", &t).unwrap();
        let text = e.to_text(&t);
        assert!(text.contains('r') && text.contains("theta"), "{text}");
        assert_eq!(Expr::parse(&text, &t).unwrap(), e);
    }
}
