//! Arithmetic expressions over `x1…xn`: tokenizer, recursive-descent parser,
//! precedence-aware printer and evaluation over plain scalars or dual numbers.
//!
//! Grammar (`^` is right associative and binds tighter than unary minus):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | parameter | func '(' expr ')' | '(' expr ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::dual::Dual;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
        }
    }
}

/// Expression tree. Parameters are folded into `Num` at parse time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based variable index (`x1` is `Var(0)`).
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let text = &src[start..i];
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Syntax { pos: start, msg: format!("malformed number `{text}`") })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else if c == '(' {
            out.push((Tok::LParen, i));
            i += 1;
        } else if c == ')' {
            out.push((Tok::RParen, i));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    n_vars: usize,
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match *self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(match self.unary()? {
                    Expr::Num(v) => Expr::Num(-v),
                    e => Expr::Neg(Box::new(e)),
                })
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(Error::Syntax { pos: self.pos(), msg: format!("expected `(` after `{name}`") });
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if let Some(k) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if (1..=self.n_vars).contains(&k) {
                        return Ok(Expr::Var(k - 1));
                    }
                }
                match self.params.get(&name) {
                    Some(&v) => Ok(Expr::Num(v)),
                    None => Err(Error::UnknownIdentifier { name, pos }),
                }
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of expression".into() }),
            Tok::RParen => Err(Error::Syntax { pos, msg: "unexpected `)`".into() }),
            Tok::Op(c) => Err(Error::Syntax { pos, msg: format!("unexpected operator `{c}`") }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.bump() {
            (Tok::RParen, _) => Ok(()),
            (_, pos) => Err(Error::Syntax { pos, msg: "expected `)`".into() }),
        }
    }
}

impl Expr {
    /// Parses `src` over variables `x1…x{n_vars}` and the given parameters.
    pub fn parse(src: &str, n_vars: usize, params: &BTreeMap<String, f64>) -> Result<Expr> {
        let toks = tokenize(src)?;
        let mut p = Parser { toks, at: 0, n_vars, params };
        let e = p.expr()?;
        match p.peek() {
            Tok::End => Ok(e),
            _ => Err(Error::Syntax { pos: p.pos(), msg: "unexpected trailing input".into() }),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    /// Evaluates the expression at `vars`.
    pub fn eval<N: Number>(&self, vars: &[N]) -> Result<N> {
        Ok(match self {
            Expr::Num(c) => N::lit(*c),
            Expr::Var(i) => *vars.get(*i).ok_or(Error::DimensionMismatch { expected: i + 1, found: vars.len() })?,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(vars)?;
                match op {
                    BinOp::Add => x + b.eval(vars)?,
                    BinOp::Sub => x - b.eval(vars)?,
                    BinOp::Mul => x * b.eval(vars)?,
                    BinOp::Div => {
                        let y = b.eval(vars)?;
                        if y.real() == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinOp::Pow => match **b {
                        Expr::Num(c) => {
                            if x.real() < 0.0 && c.fract() != 0.0 {
                                return Err(Error::Domain("fractional power of a negative number".into()));
                            }
                            if x.real() == 0.0 && c < 0.0 {
                                return Err(Error::Domain("negative power of zero".into()));
                            }
                            x.powf(c)
                        }
                        _ => {
                            if x.real() <= 0.0 {
                                return Err(Error::Domain("variable exponent needs a positive base".into()));
                            }
                            x.pow(b.eval(vars)?)
                        }
                    },
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(vars)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Tanh => x.tanh(),
                    Func::Log => {
                        if x.real() <= 0.0 {
                            return Err(Error::Domain("log of a non-positive number".into()));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x.real() < 0.0 {
                            return Err(Error::Domain("sqrt of a negative number".into()));
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    /// Largest variable index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, a, b) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ('+', a.precedence() < 1, b.precedence() <= 1),
                    BinOp::Sub => ('-', a.precedence() < 1, b.precedence() <= 1),
                    BinOp::Mul => ('*', a.precedence() < 2, b.precedence() <= 2),
                    BinOp::Div => ('/', a.precedence() < 2, b.precedence() <= 2),
                    BinOp::Pow => ('^', a.precedence() <= 4, b.precedence() < 3),
                };
                wrap(f, a, lp)?;
                write!(f, "{sym}")?;
                wrap(f, b, rp)
            }
        }
    }
}

/// Numbers an expression can be evaluated over.
pub trait Number:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lit(c: f64) -> Self;
    /// Real part, used for domain checks.
    fn real(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn tanh(self) -> Self;
    fn powf(self, c: f64) -> Self;
    fn pow(self, e: Self) -> Self;
}

macro_rules! float_number {
    ($t:ty) => {
        impl Number for $t {
            fn lit(c: f64) -> Self {
                c as $t
            }
            fn real(self) -> f64 {
                self as f64
            }
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn tanh(self) -> Self {
                <$t>::tanh(self)
            }
            fn powf(self, c: f64) -> Self {
                if c.fract() == 0.0 && c.abs() < 1024.0 {
                    self.powi(c as i32)
                } else {
                    <$t>::powf(self, c as $t)
                }
            }
            fn pow(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
        }
    };
}

float_number!(f32);
float_number!(f64);

impl<T: Scalar> Number for Dual<T> {
    fn lit(c: f64) -> Self {
        Dual::constant(T::c(c))
    }
    fn real(self) -> f64 {
        self.re.as_f64()
    }
    fn sin(self) -> Self {
        Dual::sin(self)
    }
    fn cos(self) -> Self {
        Dual::cos(self)
    }
    fn exp(self) -> Self {
        Dual::exp(self)
    }
    fn ln(self) -> Self {
        Dual::ln(self)
    }
    fn sqrt(self) -> Self {
        Dual::sqrt(self)
    }
    fn tanh(self) -> Self {
        Dual::tanh(self)
    }
    fn powf(self, c: f64) -> Self {
        Dual::powf(self, T::c(c))
    }
    fn pow(self, e: Self) -> Self {
        Dual::pow(self, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Result<Expr> {
        let params: BTreeMap<String, f64> = [("sigma".to_string(), 10.0), ("a".to_string(), -3.0)].into();
        Expr::parse(s, 3, &params)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("2+3*4").unwrap().eval(&[0.0f64; 3]).unwrap(), 14.0);
        assert_eq!(p("2^3^2").unwrap().eval(&[0.0f64; 3]).unwrap(), 512.0);
        assert_eq!(p("-2^2").unwrap().eval(&[0.0f64; 3]).unwrap(), -4.0);
        assert_eq!(p("8/4/2").unwrap().eval(&[0.0f64; 3]).unwrap(), 1.0);
        assert_eq!(p("x1-x2-x3").unwrap().eval(&[1.0f64, 2.0, 3.0]).unwrap(), -4.0);
        assert_eq!(p("2^-1").unwrap().eval(&[0.0f64; 3]).unwrap(), 0.5);
    }

    #[test]
    fn parameters_are_folded() {
        assert_eq!(
            p("sigma*x1").unwrap(),
            Expr::Bin(BinOp::Mul, Box::new(Expr::Num(10.0)), Box::new(Expr::Var(0)))
        );
        assert_eq!(p("a").unwrap(), Expr::Num(-3.0));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(p("x2+").unwrap_err(), Error::Syntax { pos: 3, msg: "unexpected end of expression".into() });
        assert!(matches!(p("(x1"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(p("x1 x2"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(p("x1 # 2"), Err(Error::Syntax { pos: 3, .. })));
        assert_eq!(p("rho*x1").unwrap_err(), Error::UnknownIdentifier { name: "rho".into(), pos: 0 });
        assert_eq!(p("x4").unwrap_err(), Error::UnknownIdentifier { name: "x4".into(), pos: 0 });
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(p("1/x1").unwrap().eval(&[0.0f64; 3]), Err(Error::Domain(_))));
        assert!(matches!(p("log(x1)").unwrap().eval(&[-1.0f64, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(p("sqrt(x1)").unwrap().eval(&[-1.0f64, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(p("x1^0.5").unwrap().eval(&[-1.0f64, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "sigma*(x2-x1)",
            "x1*(28-x3)-x2",
            "-x1^2",
            "(-x1)^2",
            "x1-(x2-x3)",
            "x1/(x2*x3)",
            "a*x1",
            "2^3^x1",
            "(2^3)^x1",
            "exp(-x1)*sin(x2+x3)",
            "-(x1+x2)",
            "x1*-x2",
            "1.5e-7*x3",
            "tanh(sqrt(x1*x1+1))",
        ] {
            let e = p(s).unwrap();
            let printed = e.to_string();
            assert_eq!(p(&printed).unwrap(), e, "{s} -> {printed}");
        }
    }
}
