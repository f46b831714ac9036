//! Nevanlinna functionals of an algebroid curve on the flat plane: the
//! characteristic `T`, proximity `m`, counting functions `N`, `N̄`, the
//! branch counting function, and checks of the first main theorem and of
//! the branching bound `N_bran ≤ (2ν-2) T + O(1)`.
//!
//! The curve maps into projective space through `[1 : W_1 : … : W_d]`.
//! Everything is averaged over the `ν` sheets.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covering::{hyperplane_divisor, CoveringModel, ValueDivisor};
use crate::defining::NumericCurve;
use crate::error::{Error, Result};
use crate::field::{format_complex, parse_complex, Backend};
use crate::quad::{gk_adaptive, tanh_sinh};

/// The Green function of the disk `|z| < r` with pole at the origin and its
/// harmonic measure `dθ/2π` on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenKernel {
    pub radius: f64,
}

impl GreenKernel {
    pub fn new(radius: f64) -> Self {
        Self { radius }
    }

    /// `(1/π) log(r/|z|)` inside the disk, 0 outside.
    pub fn value(&self, z: Complex64) -> f64 {
        let m = z.norm();
        if m >= self.radius {
            0.0
        } else {
            (self.radius / m).ln() / PI
        }
    }

    /// Mean of `f` over the boundary circle by the trapezoid rule with `n` nodes.
    pub fn boundary_average<F: FnMut(Complex64) -> f64>(&self, mut f: F, n: usize) -> f64 {
        (0..n).map(|k| f(Complex64::from_polar(self.radius, TAU * k as f64 / n as f64))).sum::<f64>() / n as f64
    }
}

/// A target point of the projective line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointTarget {
    Finite(Complex64),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TargetKind {
    Value(Complex64),
    Infinity,
    Hyperplane,
}

/// A hyperplane `Σ a_i ζ_i = 0` with unit coefficient vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneTarget {
    coeffs: Vec<Complex64>,
    kind: TargetKind,
    label: String,
}

impl HyperplaneTarget {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if coeffs.len() < 2 || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("a hyperplane needs at least two coefficients, not all zero"));
        }
        let label = format!("hyperplane:{}", coeffs.iter().map(|a| format_complex(*a)).collect::<Vec<_>>().join(","));
        Ok(Self { coeffs: coeffs.iter().map(|a| a / norm).collect(), kind: TargetKind::Hyperplane, label })
    }

    /// The point `W = a` of the projective line.
    pub fn value(a: Complex64) -> Self {
        let n = (1.0 + a.norm_sqr()).sqrt();
        Self {
            coeffs: vec![-a / n, Complex64::new(1.0 / n, 0.0)],
            kind: TargetKind::Value(a),
            label: format!("value:{}", format_complex(a)),
        }
    }

    /// The hyperplane at infinity `ζ_0 = 0` in `n`-dimensional projective space.
    pub fn infinity(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        Self { coeffs, kind: TargetKind::Infinity, label: "inf".into() }
    }

    /// Accepts `value:<c>`, a bare constant `<c>`, `inf`, or `hyperplane:a0,a1,…`.
    /// `n` is the dimension of the target space.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let t = text.trim();
        let lower = t.to_ascii_lowercase();
        let body = lower.strip_prefix("value:").unwrap_or(&lower);
        if matches!(body, "inf" | "infinity" | "∞") {
            return Ok(Self::infinity(n));
        }
        if let Some(list) = t.strip_prefix("hyperplane:") {
            let coeffs = list.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            if coeffs.len() != n + 1 {
                return Err(Error::parse(1, format!("hyperplane needs {} coefficients, got {}", n + 1, coeffs.len())));
            }
            return Self::new(coeffs);
        }
        if n != 1 {
            return Err(Error::parse(1, "value targets need a single coordinate; use hyperplane:a0,a1,…"));
        }
        Ok(Self::value(parse_complex(t.strip_prefix("value:").unwrap_or(t))?))
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The target as a point of the projective line, when it is one.
    pub fn as_point(&self) -> Option<PointTarget> {
        match self.kind {
            TargetKind::Value(a) => Some(PointTarget::Finite(a)),
            TargetKind::Infinity if self.coeffs.len() == 2 => Some(PointTarget::Infinity),
            TargetKind::Infinity => None,
            TargetKind::Hyperplane if self.coeffs.len() == 2 => Some(if self.coeffs[1].norm() == 0.0 {
                PointTarget::Infinity
            } else {
                PointTarget::Finite(-self.coeffs[0] / self.coeffs[1])
            }),
            TargetKind::Hyperplane => None,
        }
    }

    /// `u_D(ζ) = ½ log(‖ζ‖² ‖a‖² / |⟨ζ, a⟩|²)`, infinite on the hyperplane.
    pub fn potential(&self, zeta: &[Complex64]) -> f64 {
        let m = zeta.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(m > 0.0) || !m.is_finite() {
            return f64::NAN;
        }
        let norm2: f64 = zeta.iter().map(|z| (z / m).norm_sqr()).sum();
        let dot: Complex64 = zeta.iter().zip(&self.coeffs).map(|(z, a)| z / m * a).sum();
        0.5 * (norm2 / dot.norm_sqr()).ln()
    }
}

/// Values and derivatives of every product sheet at `z`.
fn sheet_jets(curve: &NumericCurve, z: Complex64, start_angle: f64) -> Result<Vec<(Vec<Complex64>, Vec<Complex64>)>> {
    let mut per: Vec<Vec<(Complex64, Complex64)>> = Vec::with_capacity(curve.components().len());
    for comp in curve.components() {
        let roots = comp.roots_unchecked(z, start_angle)?;
        let mut jets = Vec::with_capacity(roots.len());
        for w in roots {
            let (_, pw, pz) = comp.partials(z, w)?;
            jets.push((w, -pz / pw));
        }
        per.push(jets);
    }
    let mut out = vec![(vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(0.0, 0.0)])];
    for jets in per {
        out = out
            .into_iter()
            .flat_map(|(v, d)| {
                jets.iter().map(move |&(w, dw)| {
                    let mut v = v.clone();
                    let mut d = d.clone();
                    v.push(w);
                    d.push(dw);
                    (v, d)
                })
            })
            .collect();
    }
    Ok(out)
}

/// Sum over sheets of the pulled-back Fubini–Study density at `z`, relative
/// to Lebesgue measure, normalized so that the whole line has area 1.
pub(crate) fn fs_density(curve: &NumericCurve, z: Complex64, start_angle: f64) -> Result<f64> {
    let mut total = 0.0;
    for (v, d) in sheet_jets(curve, z, start_angle)? {
        let m = v.iter().map(|x| x.norm()).fold(1.0, f64::max);
        let v: Vec<Complex64> = v.iter().map(|x| x / m).collect();
        let d: Vec<Complex64> = d.iter().map(|x| x / m).collect();
        let mut num = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                num += (v[i] * d[j] - v[j] * d[i]).norm_sqr();
            }
        }
        let n2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        total += num / (n2 * n2) / PI;
    }
    Ok(total)
}

/// Evaluates the characteristic function and proximity functions of a model.
pub struct Functionals<'a> {
    model: &'a CoveringModel,
    rel_tol: f64,
}

const MAX_ANGULAR_INTERVALS: usize = 4000;
const RING_CUTOFF: f64 = 1e-13;
const RADIAL_LEVELS: usize = 8;

impl<'a> Functionals<'a> {
    pub fn new(model: &'a CoveringModel) -> Self {
        Self { model, rel_tol: model.settings().quadrature }
    }

    fn nu(&self) -> f64 {
        self.model.sheet_count() as f64
    }

    fn curve(&self) -> &NumericCurve {
        self.model.tracker().numeric()
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || r > self.model.disk_radius() * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("radius {r} outside the model disk (0, {}]", self.model.disk_radius())));
        }
        Ok(())
    }

    /// `s ∫ ρ(s e^{iθ}) dθ`, the derivative of the spherical area of `B(s)` (times ν).
    /// Panels ending at the argument of a critical point use tanh-sinh, which
    /// resolves the near-singular peak of rings passing close to it.
    pub fn ring_density(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let special: Vec<f64> = self
            .model
            .critical()
            .critical_points
            .iter()
            .filter(|c| c.norm() > 0.0)
            .map(|c| c.arg().rem_euclid(TAU))
            .collect();
        let panels = match self.model.curve().backend() {
            Backend::Exact => 8,
            Backend::Numeric => 8 + s.min(400.0).ceil() as usize,
        };
        let mut breaks: Vec<f64> = special.iter().copied().chain((0..=panels).map(|k| TAU * k as f64 / panels as f64)).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let is_special = |x: f64| special.iter().any(|&a| (a - x).abs() < 1e-12 || (a - x).abs() > TAU - 1e-12);
        let failure = RefCell::new(None);
        let angle = self.model.settings().start_angle;
        let f = |theta: f64| match fs_density(self.curve(), Complex64::from_polar(s, theta), angle) {
            Ok(v) if v.is_finite() => v,
            Ok(_) | Err(Error::PoleAtBase(_)) => 0.0,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let mut total = 0.0;
        for w in breaks.windows(2) {
            if is_special(w[0]) || is_special(w[1]) {
                total += tanh_sinh::<1, _>(|x, _, _| [f(x)], w[0], w[1], self.rel_tol, RADIAL_LEVELS).0[0];
            }
        }
        // consecutive smooth panels are handled in one adaptive pass; gaps
        // between them are special panels and must not be integrated twice
        let mut run = vec![];
        for w in breaks.windows(2) {
            if is_special(w[0]) || is_special(w[1]) {
                if run.len() > 1 {
                    total += gk_adaptive(&f, &run, 1e-15, self.rel_tol, MAX_ANGULAR_INTERVALS).value;
                }
                run.clear();
            } else {
                if run.is_empty() {
                    run.push(w[0]);
                }
                run.push(w[1]);
            }
        }
        if run.len() > 1 {
            total += gk_adaptive(&f, &run, 1e-15, self.rel_tol, MAX_ANGULAR_INTERVALS).value;
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(s * total)
    }

    /// Radial panel boundaries: the origin, the moduli of the critical points and the requested radii.
    fn radial_breaks(&self, radii: &[f64]) -> Vec<f64> {
        let rmax = radii.iter().copied().fold(0.0, f64::max);
        let mut b: Vec<f64> = std::iter::once(0.0)
            .chain(self.model.critical().critical_points.iter().map(|c| c.norm()).filter(|&m| m > 0.0 && m < rmax))
            .chain(radii.iter().copied())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
        b
    }

    /// `T(r)` on a grid of radii, by integrating the area `A(t)` against `dt/t`.
    /// Panels are shared, so the cost is that of the largest radius.
    pub fn characteristic_grid(&self, radii: &[f64]) -> Result<Vec<f64>> {
        for &r in radii {
            self.check_radius(r)?;
        }
        let breaks = self.radial_breaks(radii);
        // cumulative ∫_0^b a(s) ds and ∫_0^b a(s) log s ds at each break
        let mut cum = vec![(0.0, 0.0, 0.0)];
        let mut err_total = 0.0;
        for w in breaks.windows(2) {
            let failure = RefCell::new(None);
            let (v, err) = tanh_sinh::<2, _>(
                // rings closer than rounding to a critical modulus cannot
                // be resolved in the angular variable
                |s, da, db| {
                    if da.min(db) < RING_CUTOFF * s {
                        return [0.0, 0.0];
                    }
                    match self.ring_density(s) {
                        Ok(a) => [a, a * s.ln()],
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            [0.0, 0.0]
                        }
                    }
                },
                w[0],
                w[1],
                self.rel_tol,
                RADIAL_LEVELS,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            err_total += err;
            let last = *cum.last().expect("nonempty");
            cum.push((w[1], last.1 + v[0], last.2 + v[1]));
        }
        radii
            .iter()
            .map(|&r| {
                let (_, a, b) = *cum
                    .iter()
                    .find(|c| (c.0 - r).abs() <= 1e-14 * r.max(1.0))
                    .expect("every radius is a break");
                let t = (r.ln() * a - b) / self.nu();
                if err_total > 1e-4 * (1.0 + t.abs()) * self.nu() {
                    return Err(Error::QuadratureBudgetExceeded(0));
                }
                Ok(t.max(0.0))
            })
            .collect()
    }

    pub fn characteristic(&self, r: f64) -> Result<f64> {
        Ok(self.characteristic_grid(&[r])?[0])
    }

    /// `T(r)` as the Green-weighted double integral `(π/ν) ∫ g_r ρ dA`,
    /// integrating radially first inside each angular panel.
    pub fn characteristic_direct(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let g = GreenKernel::new(r);
        let mut rb: Vec<f64> = self.radial_breaks(&[r]);
        rb.retain(|&s| s <= r);
        let angle = self.model.settings().start_angle;
        let failure = RefCell::new(None);
        let inner = |theta: f64| -> f64 {
            let mut total = 0.0;
            for w in rb.windows(2) {
                let (v, _) = tanh_sinh::<1, _>(
                    |s, _, _| {
                        let z = Complex64::from_polar(s, theta);
                        match fs_density(self.curve(), z, angle) {
                            Ok(rho) if rho.is_finite() => [PI * g.value(z) * rho * s],
                            Ok(_) | Err(Error::PoleAtBase(_)) => [0.0],
                            Err(e) => {
                                failure.borrow_mut().get_or_insert(e);
                                [0.0]
                            }
                        }
                    },
                    w[0],
                    w[1],
                    self.rel_tol,
                    RADIAL_LEVELS,
                );
                total += v[0];
            }
            total
        };
        let mut breaks: Vec<f64> = self
            .model
            .critical()
            .critical_points
            .iter()
            .filter(|c| c.norm() > 0.0 && c.norm() < r)
            .map(|c| c.arg().rem_euclid(TAU))
            .chain((0..=8).map(|k| TAU * k as f64 / 8.0))
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let q = gk_adaptive(inner, &breaks, 1e-12, 1e-8, 400);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(q.value / self.nu())
    }

    /// `(1/ν) Σ_j (1/2π) ∫ u_D(F_j(r e^{iθ})) dθ` by trapezoid doubling, once at `r`.
    fn proximity_at(&self, target: &HyperplaneTarget, r: f64) -> Result<Option<(f64, bool)>> {
        let angle = self.model.settings().start_angle;
        let eval = |theta: f64| -> Result<Option<f64>> {
            let z = Complex64::from_polar(r, theta);
            let mut sum = 0.0;
            for (v, _) in sheet_jets(self.curve(), z, angle)? {
                let u = target.potential(&v);
                if !u.is_finite() {
                    return Ok(None);
                }
                sum += u;
            }
            Ok(Some(sum))
        };
        let mut n = 64usize;
        let mut total = 0.0;
        for k in 0..n {
            match eval(TAU * k as f64 / n as f64)? {
                Some(v) => total += v,
                None => return Ok(None),
            }
        }
        let mut prev = total / n as f64;
        loop {
            for k in 0..n {
                match eval(TAU * (k as f64 + 0.5) / n as f64)? {
                    Some(v) => total += v,
                    None => return Ok(None),
                }
            }
            n *= 2;
            let cur = total / n as f64;
            let converged = (cur - prev).abs() <= 1e-9 * (1.0 + cur.abs());
            if converged || n >= 1 << 17 {
                return Ok(Some((cur / self.nu(), converged)));
            }
            prev = cur;
        }
    }

    /// `m(r, D)`; the radius is nudged outward by `1e-6 r` (up to three
    /// times) when the circle meets the divisor. Returns the value and the
    /// radius actually used.
    pub fn proximity(&self, target: &HyperplaneTarget, r: f64) -> Result<ProximityValue> {
        self.check_radius(r)?;
        let mut radius = r;
        for attempt in 0..4 {
            match self.proximity_at(target, radius) {
                Ok(Some((value, converged))) => {
                    return Ok(ProximityValue { value: value.max(0.0), radius, perturbed: attempt > 0, converged })
                }
                Ok(None) | Err(Error::PoleAtBase(_)) => radius *= 1.0 + 1e-6,
                Err(e) => return Err(e),
            }
        }
        Err(Error::BoundaryHitsDivisor(r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProximityValue {
    pub value: f64,
    pub radius: f64,
    pub perturbed: bool,
    pub converged: bool,
}

pub fn characteristic(model: &CoveringModel, r: f64) -> Result<f64> {
    Functionals::new(model).characteristic(r)
}

pub fn proximity(model: &CoveringModel, target: &HyperplaneTarget, r: f64) -> Result<f64> {
    Ok(Functionals::new(model).proximity(target, r)?.value)
}

/// `N(r)` (or `N̄(r)` when `truncated`) from a divisor covering the disk of radius `r`.
pub fn counting(divisor: &ValueDivisor, sheet_count: usize, r: f64, truncated: bool) -> Result<f64> {
    if r > divisor.disk_radius * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("divisor known only inside radius {}", divisor.disk_radius)));
    }
    let mut total = 0.0;
    for &(z, mult) in &divisor.points {
        if z.norm() >= r {
            continue;
        }
        if z.norm() <= 1e-12 * r.max(1.0) {
            return Err(Error::DivisorPointAtOrigin);
        }
        let weight = if truncated { 1.0 } else { mult as f64 };
        total += weight * (r / z.norm()).ln();
    }
    Ok(total / sheet_count as f64)
}

/// `N_bran(r) = (1/ν) Σ (ν - l(b)) log(r/|b|)` over branch records with `|b| < r`.
pub fn branch_counting(model: &CoveringModel, r: f64) -> Result<f64> {
    let mut total = 0.0;
    for b in model.branch_records() {
        if b.point.norm() >= r {
            continue;
        }
        if b.point.norm() <= 1e-12 * r.max(1.0) {
            return Err(Error::DivisorPointAtOrigin);
        }
        total += b.order as f64 * (r / b.point.norm()).ln();
    }
    Ok(total / model.sheet_count() as f64)
}

/// `n` log-spaced radii from `rmin` to `rmax` inclusive.
pub fn log_grid(rmin: f64, rmax: f64, n: usize) -> Result<Vec<f64>> {
    if !(rmin > 0.0 && rmax >= rmin) || n == 0 {
        return Err(Error::invalid("need 0 < rmin <= rmax and at least one step"));
    }
    if n == 1 {
        return Ok(vec![rmin]);
    }
    let (a, b) = (rmin.ln(), rmax.ln());
    Ok((0..n).map(|k| if k + 1 == n { rmax } else { (a + (b - a) * k as f64 / (n - 1) as f64).exp() }).collect())
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FmtCheck {
    pub target: String,
    pub r: Vec<f64>,
    pub residual: Vec<f64>,
    pub median: f64,
    pub max_deviation: f64,
}

fn fmt_from_columns(target: &str, r: &[f64], t: &[f64], m: &[f64], n: &[f64]) -> FmtCheck {
    let residual: Vec<f64> = (0..r.len()).map(|i| t[i] - m[i] - n[i]).collect();
    let med = median(&residual);
    let max_deviation = residual.iter().map(|x| (x - med).abs()).fold(0.0, f64::max);
    FmtCheck { target: target.to_string(), r: r.to_vec(), residual, median: med, max_deviation }
}

/// `T - m - N` over the grid and its largest deviation from the median.
pub fn fmt_check(model: &CoveringModel, target: &HyperplaneTarget, r_grid: &[f64]) -> Result<FmtCheck> {
    let report = nevanlinna_report(model, std::slice::from_ref(target), r_grid)?;
    Ok(report.fmt[0].clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranBound {
    pub r: Vec<f64>,
    pub n_bran: Vec<f64>,
    pub t: Vec<f64>,
    /// `N_bran - (2ν-2) T`.
    pub excess: Vec<f64>,
    /// Largest rise of the excess above its running maximum at the end of the ramp.
    pub max_increase: f64,
}

fn bran_from_columns(nu: usize, r: &[f64], t: &[f64], n_bran: &[f64], ramp: usize) -> BranBound {
    let c = 2.0 * nu as f64 - 2.0;
    let excess: Vec<f64> = (0..r.len()).map(|i| n_bran[i] - c * t[i]).collect();
    let k0 = ramp.min(excess.len().saturating_sub(1));
    let base = excess[..=k0].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_increase = excess[k0..].iter().map(|x| x - base).fold(0.0, f64::max);
    BranBound { r: r.to_vec(), n_bran: n_bran.to_vec(), t: t.to_vec(), excess, max_increase }
}

/// Checks that `N_bran - (2ν-2) T` stays bounded above: after the first
/// `ramp` grid points it may not rise above the running maximum reached so far.
pub fn bran_bound_check(model: &CoveringModel, r_grid: &[f64], ramp: usize) -> Result<BranBound> {
    let t = Functionals::new(model).characteristic_grid(r_grid)?;
    let n_bran = r_grid.iter().map(|&r| branch_counting(model, r)).collect::<Result<Vec<_>>>()?;
    Ok(bran_from_columns(model.sheet_count(), r_grid, &t, &n_bran, ramp))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NevanlinnaReport {
    pub sheet_count: usize,
    pub dimension: usize,
    pub quadrature_tolerance: f64,
    /// Ricci term of the flat base.
    pub ricci_term: f64,
    /// Ratio of the target Kähler form to the Fubini–Study form.
    pub fs_ratio: f64,
    pub targets: Vec<String>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub m: Vec<Vec<f64>>,
    pub n: Vec<Vec<f64>>,
    pub nbar: Vec<Vec<f64>>,
    pub n_bran: Vec<f64>,
    pub fmt: Vec<FmtCheck>,
    pub warnings: Vec<String>,
}

fn target_divisor(model: &CoveringModel, target: &HyperplaneTarget) -> Result<ValueDivisor> {
    hyperplane_divisor(model, target)
}

/// All functionals on `r_grid` for each target.
pub fn nevanlinna_report(model: &CoveringModel, targets: &[HyperplaneTarget], r_grid: &[f64]) -> Result<NevanlinnaReport> {
    let f = Functionals::new(model);
    let nu = model.sheet_count();
    let t = f.characteristic_grid(r_grid)?;
    let mut warnings = Vec::new();
    let (mut m, mut n, mut nbar, mut fmt) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for target in targets {
        let div = target_divisor(model, target)?;
        let mut mi = Vec::with_capacity(r_grid.len());
        for &r in r_grid {
            let p = f.proximity(target, r)?;
            if p.perturbed {
                warnings.push(format!("{}: radius {r} moved to {} to avoid the divisor", target.label(), p.radius));
            }
            if !p.converged {
                warnings.push(format!("{}: proximity at r = {r} not converged", target.label()));
            }
            mi.push(p.value);
        }
        let ni = r_grid.iter().map(|&r| counting(&div, nu, r, false)).collect::<Result<Vec<_>>>()?;
        let nbi = r_grid.iter().map(|&r| counting(&div, nu, r, true)).collect::<Result<Vec<_>>>()?;
        fmt.push(fmt_from_columns(target.label(), r_grid, &t, &mi, &ni));
        m.push(mi);
        n.push(ni);
        nbar.push(nbi);
    }
    let n_bran = r_grid.iter().map(|&r| branch_counting(model, r)).collect::<Result<Vec<_>>>()?;
    Ok(NevanlinnaReport {
        sheet_count: nu,
        dimension: model.curve().dimension(),
        quadrature_tolerance: model.settings().quadrature,
        ricci_term: 0.0,
        fs_ratio: 1.0,
        targets: targets.iter().map(|t| t.label().to_string()).collect(),
        r: r_grid.to_vec(),
        t,
        m,
        n,
        nbar,
        n_bran,
        fmt,
        warnings,
    })
}

/// Formats with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    // no negative zero
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

impl NevanlinnaReport {
    pub fn bran_bound(&self, ramp: usize) -> BranBound {
        bran_from_columns(self.sheet_count, &self.r, &self.t, &self.n_bran, ramp)
    }

    pub fn to_csv(&self) -> String {
        let q = self.targets.len();
        let mut out = String::from("r,T");
        for prefix in ["m", "N", "Nbar"] {
            for i in 0..q {
                let _ = write!(out, ",{prefix}_target_{}", i + 1);
            }
        }
        out.push_str(",N_bran");
        for i in 0..q {
            let _ = write!(out, ",fmt_residual_{}", i + 1);
        }
        out.push('\n');
        for k in 0..self.r.len() {
            let mut row = vec![fmt17(self.r[k]), fmt17(self.t[k])];
            for col in [&self.m, &self.n, &self.nbar] {
                row.extend(col.iter().map(|c| fmt17(c[k])));
            }
            row.push(fmt17(self.n_bran[k]));
            row.extend(self.fmt.iter().map(|f| fmt17(f.residual[k])));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
