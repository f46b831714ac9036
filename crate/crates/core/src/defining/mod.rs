//! Defining polynomials `A_ν(z)W^ν + … + A_0(z)` and curves built from them.

mod bivariate;
mod critical;
mod elim;
mod numeric;

use std::fmt;

use num_complex::Complex64;

pub use bivariate::BiPoly;
pub use critical::{critical_data, ComponentCritical, CriticalData};
pub use elim::{alg_negate, alg_op, alg_reciprocal, bareiss_det, discriminant, resultant, square_free_part, AlgOp};
pub use numeric::{min_separation, NumericComponent, NumericCurve};

use crate::error::{Error, Result};
use crate::field::{Backend, Coefficient, GaussianRational, RationalFunction};

/// One algebroid coordinate. `coeffs[j]` multiplies `W^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiningPolynomial {
    coeffs: Vec<Coefficient>,
}

impl DefiningPolynomial {
    pub fn new(coeffs: Vec<Coefficient>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("a defining polynomial needs degree at least 1 in W"));
        }
        if coeffs.last().is_some_and(Coefficient::is_zero) {
            return Err(Error::invalid("leading coefficient A_ν is identically zero"));
        }
        let backend = coeffs[0].backend();
        if coeffs.iter().any(|c| c.backend() != backend) {
            return Err(Error::BackendMismatch);
        }
        Ok(Self { coeffs })
    }

    /// Parses coefficient strings `A_0 … A_ν`.
    pub fn parse<S: AsRef<str>>(coeffs: &[S], backend: Backend) -> Result<Self> {
        let parsed = coeffs
            .iter()
            .map(|s| Coefficient::parse(s.as_ref(), backend))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn from_rational(coeffs: Vec<RationalFunction>) -> Result<Self> {
        Self::new(coeffs.into_iter().map(Coefficient::Exact).collect())
    }

    pub fn from_bivariate(b: &BiPoly) -> Self {
        Self { coeffs: b.to_rational().into_iter().map(Coefficient::Exact).collect() }
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.coeffs[0].backend()
    }

    pub fn leading(&self) -> &Coefficient {
        self.coeffs.last().expect("nonempty")
    }

    pub fn exact_coeffs(&self) -> Result<Vec<RationalFunction>> {
        self.coeffs
            .iter()
            .map(|c| c.as_exact().cloned().ok_or(Error::BackendUnsupported("exact elimination")))
            .collect()
    }

    /// Denominator-free, content-free form with the leading term of `A_ν`
    /// equal to 1. Returns it with the factor `mu` such that the result is `mu * self`.
    pub fn primitive_with_factor(&self) -> Result<(BiPoly, RationalFunction)> {
        let (b, clear) = BiPoly::from_rational(&self.exact_coeffs()?);
        let (p, f) = b.primitive();
        Ok((p, f.mul(&clear)))
    }

    pub fn bivariate(&self) -> Result<BiPoly> {
        Ok(self.primitive_with_factor()?.0)
    }

    /// The canonical representative of the same root set (exact backend only).
    pub fn canonical(&self) -> Result<Self> {
        Ok(Self::from_bivariate(&self.bivariate()?))
    }

    /// `P(z + z0, W)`.
    pub fn shift(&self, z0: &GaussianRational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.shift(z0)).collect() }
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c.eval(z)?;
        }
        Ok(acc)
    }

    pub fn display_with(&self, var: &str) -> String {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let w = match j {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{j}"),
            };
            let c = c.to_string();
            terms.push(match (j, c.as_str()) {
                (0, _) => format!("({c})"),
                (_, "1") => w,
                _ => format!("({c})*{w}"),
            });
        }
        terms.join(" + ")
    }
}

impl fmt::Display for DefiningPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("W"))
    }
}

/// The coordinate-wise model `[1 : W_1 : … : W_d]` with one defining polynomial per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidCurve {
    components: Vec<DefiningPolynomial>,
    vars: Vec<String>,
}

impl AlgebroidCurve {
    pub fn new(components: Vec<DefiningPolynomial>) -> Result<Self> {
        let vars = (1..=components.len()).map(|i| format!("W{i}")).collect();
        Self::with_vars(components, vars)
    }

    pub fn with_vars(components: Vec<DefiningPolynomial>, vars: Vec<String>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a curve needs at least one component"));
        }
        if vars.len() != components.len() {
            return Err(Error::invalid("one variable name per component"));
        }
        let backend = components[0].backend();
        if components.iter().any(|c| c.backend() != backend) {
            return Err(Error::BackendMismatch);
        }
        Ok(Self { components, vars })
    }

    pub fn single(p: DefiningPolynomial) -> Self {
        Self::new(vec![p]).expect("one component")
    }

    pub fn components(&self) -> &[DefiningPolynomial] {
        &self.components
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of coordinates `d`.
    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    /// Total sheet count `ν = ν_1 ⋯ ν_d`.
    pub fn sheet_count(&self) -> usize {
        self.components.iter().map(DefiningPolynomial::degree).product()
    }

    pub fn backend(&self) -> Backend {
        self.components[0].backend()
    }

    /// The curve in the coordinate `z' = z - z0`, so that `z0` becomes the origin.
    pub fn shifted(&self, z0: Complex64) -> Result<Self> {
        let s = GaussianRational::from_complex(z0).ok_or_else(|| Error::invalid("non-finite shift"))?;
        Ok(Self { components: self.components.iter().map(|p| p.shift(&s)).collect(), vars: self.vars.clone() })
    }

    pub fn numeric(&self) -> Result<NumericCurve> {
        NumericCurve::new(self)
    }
}
