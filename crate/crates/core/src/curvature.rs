//! Comparison functions for base manifolds with curvature bounded below:
//! `χ(s, t)`, the Jacobi function `G'' + κ G = 0`, the factor `K(r, δ)`,
//! the volume factors `H(r)`, `H(r, δ)` and the Green-function band.
//!
//! These are standalone evaluators; the Nevanlinna functionals themselves
//! live on the flat plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::AnalyticExpr;
use crate::quad::gk_adaptive;
use num_complex::Complex64;

/// `sinh(st)/s`, and `t` at `s = 0`.
pub fn chi(s: f64, t: f64) -> f64 {
    if s == 0.0 {
        t
    } else {
        (s * t).sinh() / s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum KappaSpec {
    Constant { value: f64 },
    Expression { expr: String },
    Tabulated { t: Vec<f64>, kappa: Vec<f64> },
}

/// A curvature profile `t ↦ κ(t) ≤ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KappaSpec", into = "KappaSpec")]
pub struct KappaProfile {
    spec: KappaSpec,
    expr: Option<AnalyticExpr>,
}

impl TryFrom<KappaSpec> for KappaProfile {
    type Error = Error;

    fn try_from(spec: KappaSpec) -> Result<Self> {
        match &spec {
            KappaSpec::Constant { value } if !value.is_finite() || *value > 0.0 => {
                Err(Error::invalid("curvature must be finite and nonpositive"))
            }
            KappaSpec::Expression { expr } => {
                let e = AnalyticExpr::parse_with_var(expr, "t")?;
                Ok(Self { spec, expr: Some(e) })
            }
            KappaSpec::Tabulated { t, kappa } => {
                if t.len() != kappa.len() || t.len() < 2 || t.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("tabulated profile needs matching, strictly increasing abscissae"));
                }
                if kappa.iter().any(|k| !k.is_finite() || *k > 0.0) {
                    return Err(Error::invalid("curvature must be finite and nonpositive"));
                }
                Ok(Self { spec, expr: None })
            }
            _ => Ok(Self { spec, expr: None }),
        }
    }
}

impl From<KappaProfile> for KappaSpec {
    fn from(p: KappaProfile) -> Self {
        p.spec
    }
}

impl KappaProfile {
    pub fn constant(value: f64) -> Result<Self> {
        KappaSpec::Constant { value }.try_into()
    }

    /// An expression in `t`, e.g. `-t` or `-1-exp(-t)`.
    pub fn expression(expr: &str) -> Result<Self> {
        KappaSpec::Expression { expr: expr.into() }.try_into()
    }

    /// Piecewise linear through the samples, constant beyond them.
    pub fn tabulated(t: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        KappaSpec::Tabulated { t, kappa }.try_into()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.spec {
            KappaSpec::Constant { value } => Ok(*value),
            KappaSpec::Expression { .. } => {
                let v = self.expr.as_ref().expect("parsed").eval(Complex64::new(t, 0.0))?;
                if !v.re.is_finite() || v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
                    return Err(Error::invalid(format!("κ({t}) = {v} is not a real number")));
                }
                if v.re > 1e-12 {
                    return Err(Error::invalid(format!("κ({t}) = {} is positive", v.re)));
                }
                Ok(v.re.min(0.0))
            }
            KappaSpec::Tabulated { t: ts, kappa } => {
                if t <= ts[0] {
                    return Ok(kappa[0]);
                }
                let last = ts.len() - 1;
                if t >= ts[last] {
                    return Ok(kappa[last]);
                }
                let i = ts.partition_point(|&x| x <= t) - 1;
                let u = (t - ts[i]) / (ts[i + 1] - ts[i]);
                Ok(kappa[i] + u * (kappa[i + 1] - kappa[i]))
            }
        }
    }
}

const RTOL: f64 = 1e-9;
const ATOL: f64 = 1e-12;
const MAX_STEPS: usize = 200_000;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `t0` through each of the increasing
/// `stops`, returning the state at every stop.
fn dopri<const N: usize, F>(f: F, t0: f64, y0: [f64; N], stops: &[f64]) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(stops.len());
    let span = stops.last().map_or(1.0, |s| (s - t0).abs().max(1e-3));
    let mut h = 1e-3 * span;
    let mut steps = 0;
    for &stop in stops {
        while t < stop {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::SolverFailure(t));
            }
            let h_try = h.min(stop - t);
            let mut k = [[0.0; N]; 7];
            for s in 0..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    for i in 0..N {
                        ys[i] += h_try * A[s][j] * kj[i];
                    }
                }
                k[s] = f(t + C[s] * h_try, &ys)?;
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += h_try * d5;
                let sc = ATOL + RTOL * y[i].abs().max(y5[i].abs());
                err = err.max((h_try * (d5 - d4)).abs() / sc);
            }
            if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                // overflow in a trial step: retry smaller, fail once the step collapses
                h = 0.2 * h_try;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::SolverFailure(t));
                }
                continue;
            }
            if err <= 1.0 {
                t += h_try;
                y = y5;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = h_try * factor;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::SolverFailure(t));
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn check_grid(t: &[f64]) -> Result<()> {
    if t.iter().any(|x| !x.is_finite() || *x < 0.0) || t.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("grid must be nonnegative and nondecreasing"));
    }
    Ok(())
}

/// `(G(t), G'(t))` at each point of a nondecreasing grid, with `G'' + κ G = 0`, `G(0) = 0`, `G'(0) = 1`.
pub fn jacobi_profile(kappa: &KappaProfile, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_grid(t_grid)?;
    let states = dopri(|t, y: &[f64; 2]| Ok([y[1], -kappa.eval(t)? * y[0]]), 0.0, [0.0, 1.0], t_grid)?;
    Ok(states.into_iter().map(|y| (y[0], y[1])).collect())
}

pub fn jacobi_g(kappa: &KappaProfile, t: f64) -> Result<f64> {
    Ok(jacobi_profile(kappa, &[t])?[0].0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub t: Vec<f64>,
    pub g: Vec<f64>,
    /// `χ(0, t) = t`.
    pub lower: Vec<f64>,
    /// `χ(√(-κ(t)), t)`.
    pub upper: Vec<f64>,
    /// Largest violation of either bound, relative to `max(1, G)`.
    pub max_violation: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `χ(0,t) ≤ G(t) ≤ χ(√(-κ(t)), t)` on the grid, to `tolerance`
/// relative to `max(1, G)`. The upper bound needs `κ` nonincreasing.
pub fn comparison_check(kappa: &KappaProfile, t_grid: &[f64], tolerance: f64) -> Result<ComparisonReport> {
    let prof = jacobi_profile(kappa, t_grid)?;
    let g: Vec<f64> = prof.iter().map(|p| p.0).collect();
    let lower: Vec<f64> = t_grid.iter().map(|&t| chi(0.0, t)).collect();
    let upper = t_grid.iter().map(|&t| Ok(chi((-kappa.eval(t)?).sqrt(), t))).collect::<Result<Vec<_>>>()?;
    let max_violation = (0..t_grid.len())
        .map(|i| ((lower[i] - g[i]).max(g[i] - upper[i])).max(0.0) / g[i].abs().max(1.0))
        .fold(0.0, f64::max);
    Ok(ComparisonReport { t: t_grid.to_vec(), g, lower, upper, max_violation, tolerance, holds: max_violation <= tolerance })
}

/// `K(r, δ) = r^{1-2m} (∫_{1/3}^r G^{1-2m} dt)^{(1+δ)²} / G(r)^{(1-2m)(1+δ)}`.
pub fn k_factor(r: f64, delta: f64, kappa: &KappaProfile, m: u32) -> Result<f64> {
    Ok(k_factors(&[r], delta, kappa, m)?[0])
}

/// `K(r, δ)` on a nondecreasing grid of radii above `1/3`.
pub fn k_factors(r_grid: &[f64], delta: f64, kappa: &KappaProfile, m: u32) -> Result<Vec<f64>> {
    const T0: f64 = 1.0 / 3.0;
    if m == 0 || r_grid.iter().any(|&r| r <= T0) || delta < 0.0 {
        return Err(Error::invalid("K(r, δ) needs m ≥ 1, δ ≥ 0 and r > 1/3"));
    }
    check_grid(r_grid)?;
    let e = 1.0 - 2.0 * m as f64;
    let start = dopri(|t, y: &[f64; 2]| Ok([y[1], -kappa.eval(t)? * y[0]]), 0.0, [0.0, 1.0], &[T0])?[0];
    // log G and G'/G keep the state well scaled under exponential growth
    let states = dopri(
        |t, y: &[f64; 3]| {
            let (lg, q) = (y[0], y[1]);
            Ok([q, -kappa.eval(t)? - q * q, (e * lg).exp()])
        },
        T0,
        [start[0].ln(), start[1] / start[0], 0.0],
        r_grid,
    )?;
    Ok(r_grid
        .iter()
        .zip(states)
        .map(|(&r, y)| {
            let log_k = e * r.ln() + (1.0 + delta).powi(2) * y[2].ln() - e * (1.0 + delta) * y[0];
            log_k.exp()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogKBound {
    pub r: Vec<f64>,
    pub log_plus_k: Vec<f64>,
    /// `δ log r + 1` for flat profiles, `√(-κ(r)) r + 1` otherwise.
    pub shape: Vec<f64>,
    /// Secant slope of `log⁺K` against the shape over the third quarter of the grid.
    pub c: f64,
    /// The same slope over the last quarter.
    pub tail_slope: f64,
    pub holds: bool,
}

/// `log⁺K = O(shape)` on a finite grid: the secant slope of `log⁺K` against
/// the shape over the last quarter may exceed the one over the third quarter
/// by at most 25%. Superlinear growth in the shape makes the slope keep rising.
pub fn log_k_bound_check(r_grid: &[f64], delta: f64, kappa: &KappaProfile, m: u32) -> Result<LogKBound> {
    if r_grid.len() < 8 {
        return Err(Error::invalid("need at least eight radii"));
    }
    let k = k_factors(r_grid, delta, kappa, m)?;
    let log_plus_k: Vec<f64> = k.iter().map(|x| x.ln().max(0.0)).collect();
    let flat = r_grid.iter().map(|&r| kappa.eval(r)).collect::<Result<Vec<_>>>()?.iter().all(|&x| x == 0.0);
    let shape: Vec<f64> = r_grid
        .iter()
        .map(|&r| Ok(if flat { delta * r.ln().max(0.0) + 1.0 } else { (-kappa.eval(r)?).sqrt() * r + 1.0 }))
        .collect::<Result<Vec<_>>>()?;
    let n = r_grid.len();
    let secant = |i: usize, j: usize| {
        let ds = shape[j] - shape[i];
        if ds > 0.0 {
            (log_plus_k[j] - log_plus_k[i]) / ds
        } else {
            0.0
        }
    };
    let c = secant(n / 2, 3 * n / 4);
    let tail_slope = secant(3 * n / 4, n - 1);
    let holds = tail_slope <= 1.25 * c.max(0.0) + 1e-12;
    Ok(LogKBound { r: r_grid.to_vec(), log_plus_k, shape, c, tail_slope, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum VolumeSpec {
    /// `V(t) = coefficient · t^exponent`.
    Power { coefficient: f64, exponent: f64 },
    Expression { expr: String },
}

/// Volume growth `r ↦ V(r) > 0` of geodesic balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VolumeSpec", into = "VolumeSpec")]
pub struct VolumeProfile {
    spec: VolumeSpec,
    expr: Option<AnalyticExpr>,
}

impl TryFrom<VolumeSpec> for VolumeProfile {
    type Error = Error;

    fn try_from(spec: VolumeSpec) -> Result<Self> {
        match &spec {
            VolumeSpec::Power { coefficient, exponent } => {
                if !(*coefficient > 0.0) || !exponent.is_finite() || !coefficient.is_finite() {
                    return Err(Error::invalid("power-law volume needs a positive coefficient"));
                }
                Ok(Self { spec, expr: None })
            }
            VolumeSpec::Expression { expr } => {
                let e = AnalyticExpr::parse_with_var(expr, "t")?;
                Ok(Self { spec, expr: Some(e) })
            }
        }
    }
}

impl From<VolumeProfile> for VolumeSpec {
    fn from(p: VolumeProfile) -> Self {
        p.spec
    }
}

/// Upper end of the numeric tail integral, relative to `max(1, r)`.
const TAIL_CUTOFF: f64 = 1e8;

impl VolumeProfile {
    pub fn power(coefficient: f64, exponent: f64) -> Result<Self> {
        VolumeSpec::Power { coefficient, exponent }.try_into()
    }

    pub fn expression(expr: &str) -> Result<Self> {
        VolumeSpec::Expression { expr: expr.into() }.try_into()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match &self.spec {
            VolumeSpec::Power { coefficient, exponent } => coefficient * t.powf(*exponent),
            VolumeSpec::Expression { .. } => self.expr.as_ref().expect("parsed").eval(Complex64::new(t, 0.0))?.re,
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("V({t}) = {v} is not positive")));
        }
        Ok(v)
    }

    /// `∫_r^∞ t/V(t) dt`: closed form for power laws; otherwise quadrature in
    /// `log t` up to a cutoff, plus a power-law tail matched to the local
    /// growth exponent there.
    pub fn tail_integral(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::invalid("tail integral needs r > 0"));
        }
        if let VolumeSpec::Power { coefficient, exponent } = self.spec {
            if exponent <= 2.0 {
                return Err(Error::NonParabolicityViolated);
            }
            return Ok(r.powf(2.0 - exponent) / (coefficient * (exponent - 2.0)));
        }
        let big = TAIL_CUTOFF * r.max(1.0);
        let h = 1e-4;
        let growth = (self.eval(big * (1.0 + h))?.ln() - self.eval(big * (1.0 - h))?.ln()) / ((1.0 + h).ln() - (1.0 - h).ln());
        if growth <= 2.0 + 1e-6 {
            return Err(Error::NonParabolicityViolated);
        }
        let failure = std::cell::RefCell::new(None);
        let f = |u: f64| {
            let t = u.exp();
            match self.eval(t) {
                Ok(v) => t * t / v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let (a, b) = (r.ln(), big.ln());
        let breaks: Vec<f64> = (0..=32).map(|k| a + (b - a) * k as f64 / 32.0).collect();
        let q = gk_adaptive(f, &breaks, 0.0, 1e-12, 4000);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let tail = big * big / self.eval(big)? / (growth - 2.0);
        Ok(q.value + tail)
    }
}

/// `H(r) = V(r)/r² ∫_r^∞ t/V dt` and `H(r, δ) = (1/r)(V(r)/r)^{1+δ} ∫_r^∞ t/V dt`.
pub fn h_factors(volume: &VolumeProfile, r: f64, delta: f64) -> Result<(f64, f64)> {
    let tail = volume.tail_integral(r)?;
    let v = volume.eval(r)?;
    Ok((v / (r * r) * tail, (v / r).powf(1.0 + delta) / r * tail))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenBand {
    pub integral: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `A ∫_ρ^∞ t/V dt ≤ G(o, x) ≤ B ∫_ρ^∞ t/V dt` for user-supplied constants.
pub fn green_band(volume: &VolumeProfile, rho: f64, a: f64, b: f64) -> Result<GreenBand> {
    let integral = volume.tail_integral(rho)?;
    Ok(GreenBand { integral, lower: a * integral, upper: b * integral })
}
