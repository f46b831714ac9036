//! Polynomials in `W` whose coefficients are polynomials in `z`, i.e. elements
//! of Q(i)[z][W]. Elimination runs here after denominators are cleared.

use crate::field::{GaussianRational, Poly, RationalFunction};

/// Coefficients lowest power of `W` first, trimmed so the last one is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly(Vec<Poly>);

impl BiPoly {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree in `W`; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Poly {
        self.0.last().cloned().unwrap_or_default()
    }

    /// Clears denominators. Returns `(B, mu)` with `B = mu * P` and `mu` a rational function.
    pub fn from_rational(coeffs: &[RationalFunction]) -> (Self, RationalFunction) {
        let mut lcm = Poly::one();
        for c in coeffs {
            if c.is_zero() {
                continue;
            }
            let g = lcm.gcd(c.denom());
            lcm = (&lcm * c.denom()).exact_div(&g).expect("gcd divides");
        }
        let polys = coeffs
            .iter()
            .map(|c| if c.is_zero() { Poly::zero() } else { c.numer() * &lcm.exact_div(c.denom()).expect("lcm") })
            .collect();
        (Self::new(polys), RationalFunction::from_poly(lcm))
    }

    /// Gcd of the coefficients, monic.
    pub fn content(&self) -> Poly {
        self.0.iter().fold(Poly::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and scales so the leading term of the leading
    /// coefficient is 1. Returns the normalized polynomial and the rational
    /// factor it was multiplied by.
    pub fn primitive(&self) -> (Self, RationalFunction) {
        if self.is_zero() {
            return (self.clone(), RationalFunction::one());
        }
        let content = self.content();
        let lead = self.leading().exact_div(&content).expect("content divides").leading();
        let s = lead.inv().expect("nonzero");
        let out = Self::new(self.0.iter().map(|c| c.exact_div(&content).expect("content divides").scale(&s)).collect());
        let factor = RationalFunction::new(Poly::constant(s), content).expect("nonzero content");
        (out, factor)
    }

    pub fn derivative_w(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(&GaussianRational::from_integer(j as i64)))
                .collect(),
        )
    }

    pub fn to_rational(&self) -> Vec<RationalFunction> {
        self.0.iter().cloned().map(RationalFunction::from_poly).collect()
    }

    fn scale_poly(&self, p: &Poly) -> Self {
        Self::new(self.0.iter().map(|c| c * p).collect())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        let n = self.0.len().max(rhs.0.len());
        let zero = Poly::zero();
        Self::new((0..n).map(|k| f(self.0.get(k).unwrap_or(&zero), rhs.0.get(k).unwrap_or(&zero))).collect())
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn shifted_up(&self, k: usize) -> Self {
        let mut v = vec![Poly::zero(); k];
        v.extend(self.0.iter().cloned());
        Self::new(v)
    }

    /// Pseudo-remainder of `self` by `d` in `W`.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        self.pseudo_div(d).1
    }

    /// Pseudo-division: `lc(d)^e * self = q * d + r` with `e = deg self - deg d + 1`.
    pub fn pseudo_div(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "pseudo-division by zero");
        let dd = d.degree();
        let lc = d.leading();
        let mut r = self.clone();
        let mut q = Self::new(vec![]);
        if r.is_zero() || r.degree() < dd {
            return (q, r);
        }
        let mut e = r.degree() - dd + 1;
        while !r.is_zero() && r.degree() >= dd {
            let k = r.degree() - dd;
            let s = Self::new(vec![r.leading()]).shifted_up(k);
            q = q.scale_poly(&lc).add(&s);
            r = r.scale_poly(&lc).sub(&s.mul(d));
            e -= 1;
        }
        let f = lc.pow(e as u32);
        (q.scale_poly(&f), r.scale_poly(&f))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::new(vec![]);
        }
        let mut out = vec![Poly::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }

    /// Greatest common divisor in `W` over the fraction field Q(i)(z), by the
    /// primitive remainder sequence. Result is primitive and normalized.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive().0, other.primitive().0)
        } else {
            (other.primitive().0, self.primitive().0)
        };
        while !b.is_zero() {
            if b.degree() == 0 {
                return Self::new(vec![Poly::one()]);
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive().0;
        }
        a
    }

    /// Exact quotient of primitive polynomials, computed by pseudo-division
    /// and removal of the content.
    pub fn divide_primitive(&self, d: &Self) -> Self {
        let (q, r) = self.pseudo_div(d);
        debug_assert!(r.is_zero());
        q.primitive().0
    }

    /// Value at an exact `W`, as a polynomial in `z`.
    pub fn eval_w(&self, w: &GaussianRational) -> Poly {
        let mut acc = Poly::zero();
        for c in self.0.iter().rev() {
            acc = &acc.scale(w) + c;
        }
        acc
    }
}
