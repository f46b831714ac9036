//! Floating-point evaluation of defining polynomials and their fibers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::elim::sylvester;
use super::{AlgebroidCurve, DefiningPolynomial};
use crate::error::{Error, Result};
use crate::field::{AnalyticExpr, Coefficient};
use crate::roots::{horner, poly_roots};
use crate::settings::NumericSettings;

#[derive(Clone, Debug)]
enum Repr {
    Poly(Vec<Complex64>),
    Expr(AnalyticExpr),
}

impl Repr {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Repr::Poly(c) => Ok(horner(c, z).0),
            Repr::Expr(e) => e.eval(z),
        }
    }

    /// Whether the value at `z` is zero up to rounding.
    fn vanishes(&self, z: Complex64) -> Result<bool> {
        match self {
            Repr::Poly(c) => {
                let scale = c.iter().rev().fold(0.0, |acc, a| acc * z.norm() + a.norm());
                Ok(horner(c, z).0.norm() <= 1e-13 * scale)
            }
            Repr::Expr(e) => {
                let v = e.eval(z)?;
                Ok(v.norm() < 1e-280)
            }
        }
    }
}

/// One component `Ψ(z, W)` ready for evaluation. Exact components are
/// evaluated through their primitive polynomial form, which has the same
/// roots but no poles in the coefficients.
#[derive(Clone, Debug)]
pub struct NumericComponent {
    coeffs: Vec<Repr>,
    derivs: Vec<Repr>,
}

impl NumericComponent {
    pub fn new(p: &DefiningPolynomial) -> Result<Self> {
        let (coeffs, derivs) = match p.coeffs()[0] {
            Coefficient::Exact(_) => {
                let b = p.bivariate()?;
                (
                    b.coeffs().iter().map(|c| Repr::Poly(c.to_complex_coeffs())).collect(),
                    b.coeffs().iter().map(|c| Repr::Poly(c.derivative().to_complex_coeffs())).collect(),
                )
            }
            Coefficient::Numeric(_) => {
                let exprs: Vec<AnalyticExpr> = p
                    .coeffs()
                    .iter()
                    .map(|c| match c {
                        Coefficient::Numeric(e) => e.clone(),
                        Coefficient::Exact(f) => AnalyticExpr::from_rational(f),
                    })
                    .collect();
                (exprs.iter().cloned().map(Repr::Expr).collect(), exprs.iter().map(|e| Repr::Expr(e.derivative())).collect())
            }
        };
        Ok(Self { coeffs, derivs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs_at(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.coeffs.iter().map(|c| c.eval(z)).collect()
    }

    pub fn derivs_at(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.derivs.iter().map(|c| c.eval(z)).collect()
    }

    /// Whether `A_ν` vanishes at `z`, i.e. some sheet has a pole there.
    pub fn leading_vanishes(&self, z: Complex64) -> Result<bool> {
        self.coeffs.last().expect("nonempty").vanishes(z)
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok(horner(&self.coeffs_at(z)?, w).0)
    }

    /// `(Ψ, Ψ_W, Ψ_z)` at `(z, w)`.
    pub fn partials(&self, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let (p, pw) = horner(&self.coeffs_at(z)?, w);
        let (pz, _) = horner(&self.derivs_at(z)?, w);
        Ok((p, pw, pz))
    }

    /// All `ν` roots at `z` without separation checks.
    pub fn roots_unchecked(&self, z: Complex64, start_angle: f64) -> Result<Vec<Complex64>> {
        if self.leading_vanishes(z)? {
            return Err(Error::PoleAtBase(z));
        }
        let c = self.coeffs_at(z)?;
        let roots = poly_roots(&c, start_angle)?;
        if roots.len() != self.degree() || roots.iter().any(|r| !r.is_finite()) {
            return Err(Error::PoleAtBase(z));
        }
        Ok(roots)
    }

    /// All `ν` roots at a regular point; fails near the critical set.
    pub fn roots(&self, z: Complex64, settings: &NumericSettings) -> Result<Vec<Complex64>> {
        let roots = self.roots_unchecked(z, settings.start_angle)?;
        let sep = min_separation(&roots);
        if sep < settings.separation {
            return Err(Error::NearCritical { z, separation: sep });
        }
        Ok(roots)
    }

    /// `Res_W(Ψ, Ψ_W)` evaluated at `z` by a floating-point determinant.
    pub fn resultant_value(&self, z: Complex64) -> Result<Complex64> {
        let c = self.coeffs_at(z)?;
        let dc: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(j, a)| a * j as f64).collect();
        let rows = sylvester(&c, &dc, Complex64::new(0.0, 0.0));
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(m.determinant())
    }

    /// The discriminant `J_Ψ(z)`; entire when the coefficients are.
    pub fn discriminant_value(&self, z: Complex64) -> Result<Complex64> {
        let nu = self.degree();
        let a = self.coeffs.last().expect("nonempty").eval(z)?;
        let r = self.resultant_value(z)?;
        let sign = if (nu * (nu.saturating_sub(1)) / 2) % 2 == 1 { -1.0 } else { 1.0 };
        Ok(sign * r / a)
    }

    pub fn leading_value(&self, z: Complex64) -> Result<Complex64> {
        self.coeffs.last().expect("nonempty").eval(z)
    }

    pub fn constant_value(&self, z: Complex64) -> Result<Complex64> {
        self.coeffs[0].eval(z)
    }
}

/// Smallest pairwise distance relative to the size of the pair, where sizes
/// below `1e-8` of the largest root count as `1e-8` of it.
pub fn min_separation(roots: &[Complex64]) -> f64 {
    let floor = (1e-8 * roots.iter().map(|w| w.norm()).fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let scale = roots[i].norm().max(roots[j].norm()).max(floor);
            best = best.min((roots[i] - roots[j]).norm() / scale);
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct NumericCurve {
    components: Vec<NumericComponent>,
}

impl NumericCurve {
    pub fn new(curve: &AlgebroidCurve) -> Result<Self> {
        Ok(Self { components: curve.components().iter().map(NumericComponent::new).collect::<Result<_>>()? })
    }

    pub fn components(&self) -> &[NumericComponent] {
        &self.components
    }

    pub fn sheet_count(&self) -> usize {
        self.components.iter().map(NumericComponent::degree).product()
    }
}
