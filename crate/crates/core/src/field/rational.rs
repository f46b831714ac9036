use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::{GaussianRational, Poly};
use crate::error::{Error, Result};

/// An element of Q(i)(z) in canonical form: coprime numerator and denominator,
/// monic denominator, and `0/1` for zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Builds and normalizes `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        Ok(Self::normalize_parts(num, den))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z())
    }

    fn normalize_parts(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let lead_inv = den.leading().inv().expect("nonzero denominator");
        Self { num: num.scale(&lead_inv), den: den.scale(&lead_inv) }
    }

    /// Re-normalizes; canonical values are fixed points.
    pub fn normalize(&self) -> Self {
        Self::normalize_parts(self.num.clone(), self.den.clone())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self::normalize_parts(&self.num + &rhs.num, self.den.clone());
        }
        Self::normalize_parts(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::normalize_parts(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        Ok(Self::normalize_parts(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::normalize_parts(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(Self::normalize_parts(base.num.pow(e), base.den.pow(e)))
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalize_parts(n, &self.den * &self.den)
    }

    /// `f(z + c)`.
    pub fn shift(&self, c: &GaussianRational) -> Self {
        Self::normalize_parts(self.num.shift(c), self.den.shift(c))
    }

    /// Evaluates after normalization; a vanishing denominator is a pole.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let d = self.den.eval_complex(z);
        let n = self.num.eval_complex(z);
        let scale: f64 = self
            .den
            .to_complex_coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
            .sum();
        if d.norm() <= 1e-14 * scale {
            return Err(Error::Pole(z));
        }
        Ok(n / d)
    }

    pub fn eval_exact(&self, z: &GaussianRational) -> Result<GaussianRational> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::Pole(z.to_complex()));
        }
        Ok(&self.num.eval(z) / &d)
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
}

impl std::ops::Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: Self) -> Self {
        RationalFunction::add(&self, &rhs)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    #[test]
    fn normalize_cancels_and_makes_denominator_monic() {
        // (2z^2 - 2)/(2z - 2) -> z + 1
        let f = rf(&[-2, 0, 2], &[-2, 2]);
        assert_eq!(f.numer(), &Poly::from_ints(&[1, 1]));
        assert_eq!(f.denom(), &Poly::one());
        assert_eq!(f.normalize(), f);
        // 0/z^3 -> 0/1
        let zero = rf(&[], &[0, 0, 0, 1]);
        assert_eq!(zero, RationalFunction::zero());
        assert_eq!(zero.denom(), &Poly::one());
        // z/1 unchanged
        assert_eq!(rf(&[0, 1], &[1]), RationalFunction::z());
    }

    #[test]
    fn removable_singularity_evaluates_after_cancellation() {
        let f = rf(&[-1, 0, 1], &[-1, 1]);
        let v = f.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let g = rf(&[1], &[0, 1]);
        assert_eq!(g.eval(Complex64::new(0.0, 0.0)), Err(Error::Pole(Complex64::new(0.0, 0.0))));
    }

    #[test]
    fn sum_over_common_denominator() {
        // 1/z + z = (z^2 + 1)/z
        let s = rf(&[1], &[0, 1]).add(&RationalFunction::z());
        assert_eq!(s, rf(&[1, 0, 1], &[0, 1]));
    }

    #[test]
    fn division_by_zero_function_is_rejected() {
        assert_eq!(RationalFunction::one().div(&RationalFunction::zero()), Err(Error::DivisionByZeroFunction));
        assert_eq!(RationalFunction::new(Poly::one(), Poly::zero()), Err(Error::DivisionByZeroFunction));
    }
}
