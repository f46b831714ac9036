//! Coefficient arithmetic for the field that defining polynomials live over.
//!
//! The exact backend is Q(i)(z), where equality, gcds and resultants are
//! decidable. The numeric backend wraps expression trees that can only be
//! evaluated (and differentiated), which is enough for continuation and for
//! the Nevanlinna functionals.

mod expr;
mod gaussian;
mod poly;
mod rational;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use expr::AnalyticExpr;
pub use gaussian::GaussianRational;
pub use poly::Poly;
pub use rational::RationalFunction;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Coefficient {
    Exact(RationalFunction),
    Numeric(AnalyticExpr),
}

impl Coefficient {
    /// Parses a coefficient string for the given backend. The exact backend
    /// rejects transcendental functions.
    pub fn parse(text: &str, backend: Backend) -> Result<Self> {
        let e = AnalyticExpr::parse(text)?;
        match backend {
            Backend::Exact => {
                if e.is_transcendental() {
                    return Err(Error::parse(1, format!("`{text}` is transcendental; the exact backend needs a rational function")));
                }
                Ok(Coefficient::Exact(e.to_rational()?))
            }
            Backend::Numeric => Ok(Coefficient::Numeric(e)),
        }
    }

    pub fn exact(f: RationalFunction) -> Self {
        Coefficient::Exact(f)
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::Exact(RationalFunction::constant(GaussianRational::from_integer(n)))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Coefficient::Exact(_) => Backend::Exact,
            Coefficient::Numeric(_) => Backend::Numeric,
        }
    }

    pub fn as_exact(&self) -> Option<&RationalFunction> {
        match self {
            Coefficient::Exact(f) => Some(f),
            Coefficient::Numeric(_) => None,
        }
    }

    /// Identically zero. For numeric expressions only the literal constant 0 is recognized.
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(f) => f.is_zero(),
            Coefficient::Numeric(e) => e.is_zero_constant(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Coefficient::Exact(f) => f.eval(z),
            Coefficient::Numeric(e) => e.eval(z),
        }
    }

    pub fn derivative(&self) -> Self {
        match self {
            Coefficient::Exact(f) => Coefficient::Exact(f.derivative()),
            Coefficient::Numeric(e) => Coefficient::Numeric(e.derivative()),
        }
    }

    /// `c(z + shift)`.
    pub fn shift(&self, shift: &GaussianRational) -> Self {
        match self {
            Coefficient::Exact(f) => Coefficient::Exact(f.shift(shift)),
            Coefficient::Numeric(e) => Coefficient::Numeric(e.shift(shift)),
        }
    }

    pub fn arith(&self, rhs: &Self, op: FieldOp) -> Result<Self> {
        use std::sync::Arc;
        match (self, rhs) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Ok(Coefficient::Exact(match op {
                FieldOp::Add => a.add(b),
                FieldOp::Sub => a.sub(b),
                FieldOp::Mul => a.mul(b),
                FieldOp::Div => a.div(b)?,
            })),
            (Coefficient::Numeric(a), Coefficient::Numeric(b)) => {
                let (a, b) = (Arc::new(a.clone()), Arc::new(b.clone()));
                Ok(Coefficient::Numeric(match op {
                    FieldOp::Add => AnalyticExpr::Add(a, b),
                    FieldOp::Sub => AnalyticExpr::Sub(a, b),
                    FieldOp::Mul => AnalyticExpr::Mul(a, b),
                    FieldOp::Div => {
                        if b.is_zero_constant() {
                            return Err(Error::DivisionByZeroFunction);
                        }
                        AnalyticExpr::Div(a, b)
                    }
                }))
            }
            _ => Err(Error::BackendMismatch),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(r) => write!(f, "{r}"),
            Coefficient::Numeric(e) => write!(f, "{e}"),
        }
    }
}

/// A constant complex expression such as `2`, `-1.5+2i` or `exp(1)`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let e = AnalyticExpr::parse(text)?;
    let v = e.eval(Complex64::new(0.0, 0.0))?;
    let w = e.eval(Complex64::new(0.7, -0.3))?;
    if v != w || !v.is_finite() {
        return Err(Error::parse(1, format!("`{text}` is not a constant")));
    }
    Ok(v)
}

/// Shortest text that parses back to the same value.
pub fn format_complex(v: Complex64) -> String {
    if v.im == 0.0 {
        format!("{}", v.re)
    } else {
        format!("{}{:+}i", v.re, v.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(s: &str) -> Coefficient {
        Coefficient::parse(s, Backend::Exact).unwrap()
    }

    #[test]
    fn eval_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert!((exact("(z^2-1)/(z-1)").eval(one).unwrap() - 2.0).norm() < 1e-15);
        assert!(matches!(exact("1/z").eval(Complex64::new(0.0, 0.0)), Err(Error::Pole(_))));
        let c = exact("3+4i");
        assert_eq!(c.eval(Complex64::new(7.0, -2.0)).unwrap(), Complex64::new(3.0, 4.0));
    }

    #[test]
    fn arith_examples() {
        let sum = exact("1/z").arith(&exact("z"), FieldOp::Add).unwrap();
        assert_eq!(sum, exact("(z^2+1)/z"));
        let f = exact("(z+2)/(z^2-3i)");
        assert_eq!(f.arith(&exact("1"), FieldOp::Mul).unwrap(), f);
        assert!(f.arith(&f, FieldOp::Sub).unwrap().is_zero());
        assert_eq!(f.arith(&exact("0"), FieldOp::Div), Err(Error::DivisionByZeroFunction));
    }

    #[test]
    fn exact_backend_rejects_transcendentals() {
        assert!(matches!(Coefficient::parse("exp(z)", Backend::Exact), Err(Error::Parse { .. })));
        assert!(Coefficient::parse("exp(z)", Backend::Numeric).is_ok());
    }

    #[test]
    fn mixed_backends_do_not_combine() {
        let n = Coefficient::parse("z", Backend::Numeric).unwrap();
        assert_eq!(exact("z").arith(&n, FieldOp::Add), Err(Error::BackendMismatch));
    }
}
