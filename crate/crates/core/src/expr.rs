//! Scalar expressions in `x` for potentials given on the command line.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | number 'i' | 'x' | 'pi' | 'e'
//!          | function '(' sum ')' | '(' sum ')'
//! function := sin | cos | tan | exp | sinh | cosh | sqrt | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-1` is `2^(-1)`. Values are complex; `2.5i` is an
//! imaginary literal.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Grid, SampledScalar};

/// Binary operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Built-in functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Sinh,
    Cosh,
    Sqrt,
    Abs,
}

impl Function {
    const ALL: [Function; 8] = [
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Exp,
        Function::Sinh,
        Function::Cosh,
        Function::Sqrt,
        Function::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Exp => "exp",
            Function::Sinh => "sinh",
            Function::Cosh => "cosh",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, z: Complex64) -> Complex64 {
        if z.im == 0.0 && (self != Function::Sqrt || z.re >= 0.0) {
            let r = z.re;
            let v = match self {
                Function::Sin => r.sin(),
                Function::Cos => r.cos(),
                Function::Tan => r.tan(),
                Function::Exp => r.exp(),
                Function::Sinh => r.sinh(),
                Function::Cosh => r.cosh(),
                Function::Sqrt => r.sqrt(),
                Function::Abs => r.abs(),
            };
            return Complex64::new(v, 0.0);
        }
        match self {
            Function::Sin => z.sin(),
            Function::Cos => z.cos(),
            Function::Tan => z.tan(),
            Function::Exp => z.exp(),
            Function::Sinh => z.sinh(),
            Function::Cosh => z.cosh(),
            Function::Sqrt => z.sqrt(),
            Function::Abs => Complex64::new(z.norm(), 0.0),
        }
    }
}

/// Named constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    Imaginary(f64),
    Constant(Constant),
    Variable,
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Box<Expr>),
}

/// Reasons a source text is rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    UnexpectedCharacter(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnbalancedParenthesis,
    UnknownIdentifier(String),
    InvalidNumber(String),
}

/// A syntax error with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub position: usize,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = self.position;
        match &self.kind {
            SyntaxErrorKind::UnexpectedCharacter(c) => write!(f, "unexpected character '{c}' at {at}"),
            SyntaxErrorKind::UnexpectedToken(t) => write!(f, "unexpected '{t}' at {at}"),
            SyntaxErrorKind::UnexpectedEnd => write!(f, "unexpected end of expression at {at}"),
            SyntaxErrorKind::UnbalancedParenthesis => write!(f, "unbalanced parenthesis at {at}"),
            SyntaxErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier '{name}' at {at}"),
            SyntaxErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}' at {at}"),
        }
    }
}

/// Evaluation failures.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    DivisionByZero { x: f64 },
    NonFinite { node: Option<usize>, x: f64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::DivisionByZero { x } => write!(f, "division by zero at x = {x}"),
            EvalError::NonFinite { node: Some(i), x } => {
                write!(f, "non-finite value at node {i} (x = {x})")
            }
            EvalError::NonFinite { node: None, x } => write!(f, "non-finite value at x = {x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64, bool),
    Ident(String),
    Op(char),
    Open,
    Close,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v, false) => v.to_string(),
            Token::Number(v, true) => alloc::format!("{v}i"),
            Token::Ident(s) => s.clone(),
            Token::Op(c) => c.to_string(),
            Token::Open => "(".into(),
            Token::Close => ")".into(),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<(Token, usize)>, SyntaxError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Token::Op(c as char), start));
                i += 1;
            }
            b'(' => {
                out.push((Token::Open, start));
                i += 1;
            }
            b')' => {
                out.push((Token::Close, start));
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
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| SyntaxError {
                    kind: SyntaxErrorKind::InvalidNumber(text.into()),
                    position: start,
                })?;
                let imaginary = i < bytes.len()
                    && bytes[i] == b'i'
                    && !bytes
                        .get(i + 1)
                        .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
                if imaginary {
                    i += 1;
                }
                out.push((Token::Number(value, imaginary), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(source[start..i].into()), start));
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(SyntaxError {
                    kind: SyntaxErrorKind::UnexpectedCharacter(ch),
                    position: start,
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn error(&self, kind: SyntaxErrorKind) -> SyntaxError {
        SyntaxError {
            kind,
            position: self.position(),
        }
    }

    fn unexpected(&self) -> SyntaxError {
        match self.peek() {
            None => self.error(SyntaxErrorKind::UnexpectedEnd),
            Some(Token::Close) => self.error(SyntaxErrorKind::UnbalancedParenthesis),
            Some(t) => self.error(SyntaxErrorKind::UnexpectedToken(t.describe())),
        }
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.product()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let op = if c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let op = if c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn parenthesized(&mut self) -> Result<Expr, SyntaxError> {
        let open = self.position();
        match self.peek() {
            Some(Token::Open) => self.pos += 1,
            _ => return Err(self.unexpected()),
        }
        let inner = self.sum()?;
        match self.peek() {
            Some(Token::Close) => {
                self.pos += 1;
                Ok(inner)
            }
            None => Err(SyntaxError {
                kind: SyntaxErrorKind::UnbalancedParenthesis,
                position: open,
            }),
            Some(_) => Err(self.unexpected()),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.position();
        match self.peek().cloned() {
            Some(Token::Number(v, imaginary)) => {
                self.pos += 1;
                Ok(if imaginary { Expr::Imaginary(v) } else { Expr::Number(v) })
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Expr::Variable),
                    "pi" => Ok(Expr::Constant(Constant::Pi)),
                    "e" => Ok(Expr::Constant(Constant::E)),
                    _ => match Function::from_name(&name) {
                        Some(f) => Ok(Expr::Call(f, Box::new(self.parenthesized()?))),
                        None => Err(SyntaxError {
                            kind: SyntaxErrorKind::UnknownIdentifier(name),
                            position: start,
                        }),
                    },
                }
            }
            Some(Token::Open) => self.parenthesized(),
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an expression.
pub fn parse(source: &str) -> Result<Expr, SyntaxError> {
    let mut parser = Parser {
        tokens: tokenize(source)?,
        pos: 0,
        end: source.len(),
    };
    let expr = parser.sum()?;
    if parser.peek().is_some() {
        return Err(parser.unexpected());
    }
    Ok(expr)
}

impl core::str::FromStr for Expr {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

fn power(base: Complex64, exponent: Complex64) -> Complex64 {
    if exponent.im == 0.0 {
        let p = exponent.re;
        if base.im == 0.0 && (base.re >= 0.0 || p.fract() == 0.0) {
            return Complex64::new(base.re.powf(p), 0.0);
        }
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            return base.powi(p as i32);
        }
    }
    if base == Complex64::new(0.0, 0.0) {
        return if exponent.re > 0.0 {
            base
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        };
    }
    (exponent * base.ln()).exp()
}

impl Expr {
    /// Value at `x`.
    pub fn evaluate(&self, x: f64) -> Result<Complex64, EvalError> {
        let value = self.eval_raw(x)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(EvalError::NonFinite { node: None, x });
        }
        Ok(value)
    }

    fn eval_raw(&self, x: f64) -> Result<Complex64, EvalError> {
        Ok(match self {
            Expr::Number(v) => Complex64::new(*v, 0.0),
            Expr::Imaginary(v) => Complex64::new(0.0, *v),
            Expr::Constant(Constant::Pi) => Complex64::new(core::f64::consts::PI, 0.0),
            Expr::Constant(Constant::E) => Complex64::new(core::f64::consts::E, 0.0),
            Expr::Variable => Complex64::new(x, 0.0),
            Expr::Neg(a) => {
                let v = a.eval_raw(x)?;
                // keep real values on the principal branch (no -0 imaginary part)
                if v.im == 0.0 {
                    Complex64::new(-v.re, 0.0)
                } else {
                    -v
                }
            }
            Expr::Call(f, a) => f.apply(a.eval_raw(x)?),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_raw(x)?, b.eval_raw(x)?);
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => {
                        if a.im == 0.0 && b.im == 0.0 {
                            Complex64::new(a.re * b.re, 0.0)
                        } else {
                            a * b
                        }
                    }
                    BinaryOp::Div => {
                        if b.re == 0.0 && b.im == 0.0 {
                            return Err(EvalError::DivisionByZero { x });
                        }
                        if b.im == 0.0 {
                            a / b.re
                        } else {
                            a / b
                        }
                    }
                    BinaryOp::Pow => power(a, b),
                }
            }
        })
    }

    /// Nodewise values on `grid`.
    pub fn evaluate_on_grid(&self, grid: &Grid) -> Result<SampledScalar, EvalError> {
        let mut values = Vec::with_capacity(grid.len());
        for (i, x) in grid.nodes().enumerate() {
            let v = self.evaluate(x).map_err(|e| match e {
                EvalError::NonFinite { x, .. } => EvalError::NonFinite { node: Some(i), x },
                other => other,
            })?;
            values.push(v);
        }
        Ok(SampledScalar::from_values(*grid, values).expect("one value per node"))
    }

    /// Whether the tree contains no imaginary literal.
    pub fn is_real(&self) -> bool {
        match self {
            Expr::Imaginary(_) => false,
            Expr::Number(_) | Expr::Constant(_) | Expr::Variable => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_real(),
            Expr::Binary(_, a, b) => a.is_real() && b.is_real(),
        }
    }
}

/// Fully parenthesised form, parsed back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v:?}"),
            Expr::Imaginary(v) => write!(f, "{v:?}i"),
            Expr::Constant(Constant::Pi) => f.write_str("pi"),
            Expr::Constant(Constant::E) => f.write_str("e"),
            Expr::Variable => f.write_str("x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Evaluates `source` at every node of `grid`.
pub fn evaluate_on_grid(expr: &Expr, grid: &Grid) -> Result<SampledScalar, EvalError> {
    expr.evaluate_on_grid(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    fn eval(s: &str, x: f64) -> Complex64 {
        parse(s).unwrap().evaluate(x).unwrap()
    }

    #[test]
    fn variable_and_negation() {
        assert_eq!(eval("x", 0.3), Complex64::new(0.3, 0.0));
        assert_eq!(parse("-x").unwrap(), Expr::Neg(Box::new(Expr::Variable)));
        assert_eq!(parse(" - x ").unwrap(), parse("-x").unwrap());
    }

    #[test]
    fn hand_evaluated() {
        assert!((eval("2*sin(pi*x)^2", 0.25).re - 1.0).abs() < 1e-15);
        assert!((eval("exp(x)", 1.0).re - core::f64::consts::E).abs() < 1e-15);
        assert_eq!(eval("2^-1", 0.0), Complex64::new(0.5, 0.0));
        assert_eq!(eval("-2^2", 0.0), Complex64::new(-4.0, 0.0));
        assert_eq!(eval("(-2)^2", 0.0), Complex64::new(4.0, 0.0));
        assert_eq!(eval("2^3^2", 0.0), Complex64::new(512.0, 0.0));
        assert_eq!(eval("1.5e2 + 2E-1", 0.0), Complex64::new(150.2, 0.0));
        assert!((eval("sqrt(-4)", 0.0) - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(eval("abs(3 + 4i)", 0.0), Complex64::new(5.0, 0.0));
        assert!((eval("cosh(x)^2 - sinh(x)^2", 0.7).re - 1.0).abs() < 1e-14);
        assert!((eval("tan(x)", 0.4).re - 0.4f64.tan()).abs() < 1e-16);
        assert!((eval("2*e", 0.0).re - 2.0 * core::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(eval("1i", 0.0), Complex64::new(0.0, 1.0));
        assert_eq!(eval("1+2i", 0.0), Complex64::new(1.0, 2.0));
        assert_eq!(eval("1+2*1i", 0.0), Complex64::new(1.0, 2.0));
        assert_eq!(eval("(0.3+0.4i)*sin(pi*x)", 0.5), Complex64::new(0.3, 0.4));
        assert!(!parse("0.5i").unwrap().is_real());
        assert!(parse("x*2").unwrap().is_real());
    }

    #[test]
    fn grid_evaluation() {
        let grid = Grid::new(1.0, 10).unwrap();
        let zeros = parse("0").unwrap().evaluate_on_grid(&grid).unwrap();
        assert!(zeros.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        let i = parse("1i").unwrap().evaluate_on_grid(&grid).unwrap();
        assert!(i.values().iter().all(|v| *v == Complex64::new(0.0, 1.0)));
        let e = parse("exp(x)").unwrap().evaluate_on_grid(&grid).unwrap();
        assert!((e.last().re - core::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn evaluation_errors() {
        let grid = Grid::new(1.0, 10).unwrap();
        assert_eq!(
            parse("1/x").unwrap().evaluate_on_grid(&grid),
            Err(EvalError::DivisionByZero { x: 0.0 })
        );
        assert_eq!(
            parse("exp(10000*x)").unwrap().evaluate_on_grid(&grid),
            Err(EvalError::NonFinite { node: Some(1), x: 0.1 })
        );
        assert!(parse("0^-1").unwrap().evaluate(0.0).is_err());
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let err = |s: &str| parse(s).unwrap_err();
        assert_eq!(err("sin(x").kind, SyntaxErrorKind::UnbalancedParenthesis);
        assert_eq!(err("sin(x").position, 3);
        assert_eq!(err("x)").kind, SyntaxErrorKind::UnbalancedParenthesis);
        assert_eq!(err("x)").position, 1);
        assert_eq!(
            err("2 * y"),
            SyntaxError {
                kind: SyntaxErrorKind::UnknownIdentifier("y".into()),
                position: 4,
            }
        );
        assert_eq!(err("x +").kind, SyntaxErrorKind::UnexpectedEnd);
        assert_eq!(err("x $ 2").kind, SyntaxErrorKind::UnexpectedCharacter('$'));
        assert_eq!(err("x 2").kind, SyntaxErrorKind::UnexpectedToken("2".into()));
        assert_eq!(err("1.2.3").kind, SyntaxErrorKind::InvalidNumber("1.2.3".into()));
        assert_eq!(err("").kind, SyntaxErrorKind::UnexpectedEnd);
        assert!(format!("{}", err("sin")).contains("at 3"));
    }

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Number),
            (0.0f64..10.0).prop_map(Expr::Imaginary),
            Just(Expr::Variable),
            Just(Expr::Constant(Constant::Pi)),
            Just(Expr::Constant(Constant::E)),
        ]
    }

    fn tree() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(4, 32, 2, |inner| {
            let op = prop_oneof![
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
                Just(BinaryOp::Div),
                Just(BinaryOp::Pow),
            ];
            let func = (0usize..Function::ALL.len()).prop_map(|i| Function::ALL[i]);
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Binary(o, Box::new(a), Box::new(b))),
                (func, inner).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
            ]
        })
    }

    const VOCABULARY: [&str; 16] = [
        "x", "1", "2.5", "3i", "pi", "e", "+", "-", "*", "/", "^", "(", ")", "sin", "y", "@",
    ];

    proptest! {
        #[test]
        fn print_parse_round_trip(e in tree()) {
            let printed = format!("{e}");
            prop_assert_eq!(parse(&printed).unwrap(), e);
        }

        #[test]
        fn precedence(a in 0.1f64..5.0, b in 0.1f64..3.0, c in 0.1f64..2.0) {
            let ev = |s: String| parse(&s).unwrap().evaluate(0.0).unwrap();
            prop_assert_eq!(ev(format!("{a:?}+{b:?}*{c:?}")), ev(format!("{a:?}+({b:?}*{c:?})")));
            prop_assert_eq!(ev(format!("{a:?}^{b:?}^{c:?}")), ev(format!("{a:?}^({b:?}^{c:?})")));
            prop_assert_eq!(ev(format!("-{a:?}^{b:?}")), ev(format!("-({a:?}^{b:?})")));
            prop_assert_eq!(ev(format!("{a:?}-{b:?}-{c:?}")), ev(format!("({a:?}-{b:?})-{c:?}")));
        }

        #[test]
        fn random_tokens_never_panic(picks in proptest::collection::vec(0usize..VOCABULARY.len(), 0..12)) {
            let source: String = picks.iter().map(|&i| VOCABULARY[i]).collect::<Vec<_>>().join(" ");
            match parse(&source) {
                Ok(e) => { let _ = e.evaluate(0.5); }
                Err(err) => prop_assert!(err.position <= source.len()),
            }
        }

        #[test]
        fn arbitrary_text_never_panics(source in "\\PC{0,24}") {
            let _ = parse(&source);
        }
    }
}
