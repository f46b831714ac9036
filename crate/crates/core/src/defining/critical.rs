use num_complex::Complex64;
use serde::Serialize;

use super::elim::resultant_poly;
use super::{AlgebroidCurve, DefiningPolynomial, NumericComponent};
use crate::error::{Error, Result};
use crate::field::Backend;
use crate::roots::{dedup_points, exact_roots, snapped_cmp};
use crate::settings::NumericSettings;
use crate::zeros::{zeros_in_disk, ZeroSearch};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComponentCritical {
    /// Zeros of the discriminant `J_Ψ`.
    pub multiple_points: Vec<Complex64>,
    /// Zeros of `A_ν`, where some sheet has a pole.
    pub leading_coeff_zeros: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalData {
    pub disk_radius: f64,
    pub critical_points: Vec<Complex64>,
    pub multiple_points: Vec<Complex64>,
    pub leading_coeff_zeros: Vec<Complex64>,
    pub per_component: Vec<ComponentCritical>,
}

impl CriticalData {
    /// Distance from `z` to the nearest critical point, or infinity.
    pub fn clearance(&self, z: Complex64) -> f64 {
        self.critical_points.iter().map(|c| (z - c).norm()).fold(f64::INFINITY, f64::min)
    }
}

fn sorted(mut v: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    v.sort_by(|a, b| snapped_cmp(*a, *b, 1.0));
    dedup_points(&mut v, tol);
    v
}

fn exact_component(p: &DefiningPolynomial, radius: f64, settings: &NumericSettings) -> Result<ComponentCritical> {
    let b = p.bivariate()?;
    let lead = b.leading();
    let in_disk = |roots: Vec<(Complex64, usize)>| -> Vec<Complex64> {
        roots.into_iter().map(|(z, _)| z).filter(|z| z.norm() < radius).collect()
    };
    let leading_coeff_zeros = in_disk(exact_roots(&lead, settings.start_angle)?);
    if b.degree() < 2 {
        return Ok(ComponentCritical { multiple_points: vec![], leading_coeff_zeros });
    }
    let r = resultant_poly(b.coeffs(), b.derivative_w().coeffs());
    if r.is_zero() {
        return Err(Error::invalid(format!("component {p} has a repeated factor in W; take its square-free part")));
    }
    let j = r.exact_div(&lead).expect("leading coefficient divides the resultant");
    Ok(ComponentCritical { multiple_points: in_disk(exact_roots(&j, settings.start_angle)?), leading_coeff_zeros })
}

fn numeric_component(p: &DefiningPolynomial, radius: f64) -> Result<ComponentCritical> {
    let c = NumericComponent::new(p)?;
    let origin = Complex64::new(0.0, 0.0);
    let search = ZeroSearch::default();
    let strip = |v: Vec<(Complex64, usize)>| v.into_iter().map(|(z, _)| z).collect::<Vec<_>>();
    let leading_coeff_zeros = if p.leading().is_zero() {
        vec![]
    } else {
        strip(zeros_in_disk(|z| c.leading_value(z), origin, radius, &search)?)
    };
    if c.degree() < 2 {
        return Ok(ComponentCritical { multiple_points: vec![], leading_coeff_zeros });
    }
    // J_Ψ = ±Res/A_ν is analytic wherever the coefficients are.
    let multiple_points = strip(zeros_in_disk(|z| c.discriminant_value(z), origin, radius, &search)?);
    Ok(ComponentCritical { multiple_points, leading_coeff_zeros })
}

/// Critical, multiple and pole points of every component inside `|z| < disk_radius`.
pub fn critical_data(curve: &AlgebroidCurve, disk_radius: f64, settings: &NumericSettings) -> Result<CriticalData> {
    let tol = settings.cluster;
    let per_component = curve
        .components()
        .iter()
        .map(|p| match curve.backend() {
            Backend::Exact => exact_component(p, disk_radius, settings),
            Backend::Numeric => numeric_component(p, disk_radius),
        })
        .map(|r| {
            r.map(|c| ComponentCritical {
                multiple_points: sorted(c.multiple_points, tol),
                leading_coeff_zeros: sorted(c.leading_coeff_zeros, tol),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let multiple_points = sorted(per_component.iter().flat_map(|c| c.multiple_points.iter().copied()).collect(), tol);
    let leading_coeff_zeros =
        sorted(per_component.iter().flat_map(|c| c.leading_coeff_zeros.iter().copied()).collect(), tol);
    let critical_points = sorted(multiple_points.iter().chain(&leading_coeff_zeros).copied().collect(), tol);
    Ok(CriticalData { disk_radius, critical_points, multiple_points, leading_coeff_zeros, per_component })
}
