//! Expression trees for coefficients, and the parser for coefficient strings.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary | implicit)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' ['-' | '+'] integer)?
//! atom    := number ['i'] | 'i' | VAR | ('exp' | 'sin' | 'cos') '(' sum ')' | '(' sum ')'
//! ```
//!
//! Juxtaposition (`2z`, `3(z+1)`) is multiplication.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{GaussianRational, Poly, RationalFunction};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub enum AnalyticExpr {
    Var,
    Const(GaussianRational),
    Add(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Sub(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Mul(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Div(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Neg(Arc<AnalyticExpr>),
    Pow(Arc<AnalyticExpr>, i32),
    Exp(Arc<AnalyticExpr>),
    Sin(Arc<AnalyticExpr>),
    Cos(Arc<AnalyticExpr>),
}

use AnalyticExpr as E;

impl AnalyticExpr {
    pub fn constant(c: GaussianRational) -> Self {
        E::Const(c)
    }

    pub fn int(n: i64) -> Self {
        E::Const(GaussianRational::from_integer(n))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_var(text, "z")
    }

    /// Parses with a custom variable name (profiles use `t`).
    pub fn parse_with_var(text: &str, var: &str) -> Result<Self> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, var: var.as_bytes() };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::parse(p.pos + 1, format!("unexpected `{}`", p.src[p.pos] as char)));
        }
        Ok(e)
    }

    pub fn is_transcendental(&self) -> bool {
        match self {
            E::Var | E::Const(_) => false,
            E::Exp(_) | E::Sin(_) | E::Cos(_) => true,
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => {
                a.is_transcendental() || b.is_transcendental()
            }
            E::Neg(a) | E::Pow(a, _) => a.is_transcendental(),
        }
    }

    /// Exact conversion; fails on transcendental nodes.
    pub fn to_rational(&self) -> Result<RationalFunction> {
        Ok(match self {
            E::Var => RationalFunction::z(),
            E::Const(c) => RationalFunction::constant(c.clone()),
            E::Add(a, b) => a.to_rational()?.add(&b.to_rational()?),
            E::Sub(a, b) => a.to_rational()?.sub(&b.to_rational()?),
            E::Mul(a, b) => a.to_rational()?.mul(&b.to_rational()?),
            E::Div(a, b) => a.to_rational()?.div(&b.to_rational()?)?,
            E::Neg(a) => a.to_rational()?.neg(),
            E::Pow(a, e) => a.to_rational()?.pow(*e)?,
            E::Exp(_) | E::Sin(_) | E::Cos(_) => {
                return Err(Error::invalid("transcendental function in an exact coefficient"))
            }
        })
    }

    pub fn from_rational(f: &RationalFunction) -> Self {
        let num = Self::from_poly(f.numer());
        if f.denom().is_constant() && f.denom().leading().is_one() {
            num
        } else {
            E::Div(Arc::new(num), Arc::new(Self::from_poly(f.denom())))
        }
    }

    fn from_poly(p: &Poly) -> Self {
        let mut acc: Option<Self> = None;
        for (k, c) in p.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => E::Const(c.clone()),
                _ => {
                    let zk = if k == 1 { E::Var } else { E::Pow(Arc::new(E::Var), k as i32) };
                    if c.is_one() {
                        zk
                    } else {
                        E::Mul(Arc::new(E::Const(c.clone())), Arc::new(zk))
                    }
                }
            };
            acc = Some(match acc {
                None => mono,
                Some(a) => E::Add(Arc::new(a), Arc::new(mono)),
            });
        }
        acc.unwrap_or_else(|| E::int(0))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = match self {
            E::Var => z,
            E::Const(c) => c.to_complex(),
            E::Add(a, b) => a.eval(z)? + b.eval(z)?,
            E::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            E::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            E::Div(a, b) => {
                let d = b.eval(z)?;
                if d.norm() == 0.0 {
                    return Err(Error::Pole(z));
                }
                a.eval(z)? / d
            }
            E::Neg(a) => -a.eval(z)?,
            E::Pow(a, e) => {
                let b = a.eval(z)?;
                if *e < 0 && b.norm() == 0.0 {
                    return Err(Error::Pole(z));
                }
                b.powi(*e)
            }
            E::Exp(a) => a.eval(z)?.exp(),
            E::Sin(a) => a.eval(z)?.sin(),
            E::Cos(a) => a.eval(z)?.cos(),
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Pole(z))
        }
    }

    /// Symbolic derivative in the variable, lightly simplified.
    pub fn derivative(&self) -> Self {
        match self {
            E::Var => E::int(1),
            E::Const(_) => E::int(0),
            E::Add(a, b) => add(a.derivative(), b.derivative()),
            E::Sub(a, b) => sub(a.derivative(), b.derivative()),
            E::Mul(a, b) => add(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
            E::Div(a, b) => {
                let num = sub(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative()));
                E::Div(Arc::new(num), Arc::new(E::Pow(b.clone(), 2)))
            }
            E::Neg(a) => neg(a.derivative()),
            E::Pow(a, e) => match e {
                0 => E::int(0),
                1 => a.derivative(),
                _ => mul(mul(E::int(*e as i64), E::Pow(a.clone(), e - 1)), a.derivative()),
            },
            E::Exp(a) => mul(self.clone(), a.derivative()),
            E::Sin(a) => mul(E::Cos(a.clone()), a.derivative()),
            E::Cos(a) => neg(mul(E::Sin(a.clone()), a.derivative())),
        }
    }

    /// Substitutes `z -> z + c`.
    pub fn shift(&self, c: &GaussianRational) -> Self {
        match self {
            E::Var => E::Add(Arc::new(E::Var), Arc::new(E::Const(c.clone()))),
            E::Const(_) => self.clone(),
            E::Add(a, b) => E::Add(Arc::new(a.shift(c)), Arc::new(b.shift(c))),
            E::Sub(a, b) => E::Sub(Arc::new(a.shift(c)), Arc::new(b.shift(c))),
            E::Mul(a, b) => E::Mul(Arc::new(a.shift(c)), Arc::new(b.shift(c))),
            E::Div(a, b) => E::Div(Arc::new(a.shift(c)), Arc::new(b.shift(c))),
            E::Neg(a) => E::Neg(Arc::new(a.shift(c))),
            E::Pow(a, e) => E::Pow(Arc::new(a.shift(c)), *e),
            E::Exp(a) => E::Exp(Arc::new(a.shift(c))),
            E::Sin(a) => E::Sin(Arc::new(a.shift(c))),
            E::Cos(a) => E::Cos(Arc::new(a.shift(c))),
        }
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self, E::Const(c) if c.is_zero())
    }
}

fn is_const(e: &AnalyticExpr, v: i64) -> bool {
    matches!(e, E::Const(c) if *c == GaussianRational::from_integer(v))
}

fn add(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr {
    if is_const(&a, 0) {
        b
    } else if is_const(&b, 0) {
        a
    } else {
        E::Add(Arc::new(a), Arc::new(b))
    }
}

fn sub(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr {
    if is_const(&b, 0) {
        a
    } else if is_const(&a, 0) {
        neg(b)
    } else {
        E::Sub(Arc::new(a), Arc::new(b))
    }
}

fn mul(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr {
    if is_const(&a, 0) || is_const(&b, 0) {
        E::int(0)
    } else if is_const(&a, 1) {
        b
    } else if is_const(&b, 1) {
        a
    } else {
        E::Mul(Arc::new(a), Arc::new(b))
    }
}

fn neg(a: AnalyticExpr) -> AnalyticExpr {
    match a {
        E::Const(c) => E::Const(-c),
        E::Neg(inner) => (*inner).clone(),
        other => E::Neg(Arc::new(other)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: &'a [u8],
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

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos + 1, message))
    }

    fn sum(&mut self) -> Result<AnalyticExpr> {
        let mut acc = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if c == b'+' { E::Add(Arc::new(acc), Arc::new(rhs)) } else { E::Sub(Arc::new(acc), Arc::new(rhs)) };
        }
        Ok(acc)
    }

    fn starts_atom(&mut self) -> bool {
        match self.peek() {
            Some(c) => c.is_ascii_alphanumeric() || c == b'(' || c == b'.',
            None => false,
        }
    }

    fn product(&mut self) -> Result<AnalyticExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = E::Mul(Arc::new(acc), Arc::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = E::Div(Arc::new(acc), Arc::new(self.unary()?));
                }
                _ if self.starts_atom() => {
                    acc = E::Mul(Arc::new(acc), Arc::new(self.power()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<AnalyticExpr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<AnalyticExpr> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let mut sign = 1i64;
        let mut parens = false;
        if self.peek() == Some(b'(') {
            parens = true;
            self.pos += 1;
        }
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer exponent");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let e: i64 = match text.parse() {
            Ok(e) if e <= 4096 => e,
            _ => return Err(Error::parse(start + 1, "exponent out of range")),
        };
        if parens {
            if self.peek() != Some(b')') {
                return self.err("expected `)`");
            }
            self.pos += 1;
        }
        Ok(E::Pow(Arc::new(base), (sign * e) as i32))
    }

    fn atom(&mut self) -> Result<AnalyticExpr> {
        let Some(c) = self.peek() else {
            return self.err("unexpected end of expression");
        };
        if c == b'(' {
            self.pos += 1;
            let e = self.sum()?;
            if self.peek() != Some(b')') {
                return self.err("expected `)`");
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                self.pos += 1;
            }
            // exponent part, only when followed by a digit or sign+digit
            if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
                let mut look = self.pos + 1;
                if look < self.src.len() && (self.src[look] == b'-' || self.src[look] == b'+') {
                    look += 1;
                }
                if look < self.src.len() && self.src[look].is_ascii_digit() {
                    self.pos = look;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            let Some(value) = GaussianRational::parse_decimal(text) else {
                return Err(Error::parse(start + 1, format!("bad number `{text}`")));
            };
            if self.pos < self.src.len() && self.src[self.pos] == b'i' && !self.ident_continues(self.pos + 1) {
                self.pos += 1;
                return Ok(E::Const(&value * &GaussianRational::i()));
            }
            return Ok(E::Const(value));
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let word = &self.src[start..self.pos];
            if word == self.var {
                return Ok(E::Var);
            }
            if word == b"i" {
                return Ok(E::Const(GaussianRational::i()));
            }
            let ctor: fn(Arc<AnalyticExpr>) -> AnalyticExpr = match word {
                b"exp" => E::Exp,
                b"sin" => E::Sin,
                b"cos" => E::Cos,
                _ => {
                    let w = String::from_utf8_lossy(word).into_owned();
                    return Err(Error::parse(start + 1, format!("unknown identifier `{w}`")));
                }
            };
            if self.peek() != Some(b'(') {
                return self.err("expected `(` after function name");
            }
            self.pos += 1;
            let arg = self.sum()?;
            if self.peek() != Some(b')') {
                return self.err("expected `)`");
            }
            self.pos += 1;
            return Ok(ctor(Arc::new(arg)));
        }
        self.err(format!("unexpected `{}`", c as char))
    }

    fn ident_continues(&self, at: usize) -> bool {
        at < self.src.len() && self.src[at].is_ascii_alphanumeric()
    }
}

impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Var => write!(f, "z"),
            E::Const(c) => write!(f, "{c}"),
            E::Add(a, b) => write!(f, "({a} + {b})"),
            E::Sub(a, b) => write!(f, "({a} - {b})"),
            E::Mul(a, b) => write!(f, "{a}*{b}"),
            E::Div(a, b) => write!(f, "{a}/({b})"),
            E::Neg(a) => write!(f, "-({a})"),
            E::Pow(a, e) => write!(f, "({a})^{e}"),
            E::Exp(a) => write!(f, "exp({a})"),
            E::Sin(a) => write!(f, "sin({a})"),
            E::Cos(a) => write!(f, "cos({a})"),
        }
    }
}
