//! Fractional-power expansions at a point, fitted from tracked values.
//!
//! A cycle of `λ` sheets around `p` becomes single-valued in the uniformizing
//! coordinate `t` with `z - p = t^λ`. Tracking the cycle once around the
//! `t`-circle of radius `ρ^{1/λ}` gives equispaced samples of a Laurent
//! series in `t`, whose coefficients come out of a discrete Fourier transform.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::monodromy::{local_radius, Permutation};
use super::path::PathSpec;
use super::track::Tracker;
use crate::defining::AlgebroidCurve;
use crate::error::{Error, Result};
use crate::roots::snapped_cmp;
use crate::settings::NumericSettings;

const SAMPLES_PER_TURN: usize = 96;
const SIGNIFICANT: f64 = 1e-11;
const FIT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuiseuxTerm {
    /// The term is `coefficient * (z - p)^(index / λ)`.
    pub index: i64,
    pub coefficient: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuiseuxSeries {
    pub branch_point: Complex64,
    /// Zero-based coordinate (component) index.
    pub coordinate: usize,
    /// Component roots at `branch_point + radius` belonging to the cycle, in cycle order.
    pub sheets: Vec<usize>,
    pub ramification: usize,
    /// `τ` of the leading fractional exponent `τ/λ`: the smallest nonzero index with a nonzero coefficient.
    pub leading_index: i64,
    pub terms: Vec<PuiseuxTerm>,
    /// Radius in `z` of the sampling circle.
    pub radius: f64,
    /// Largest relative misfit of the untruncated fit at off-grid samples.
    pub fit_residual: f64,
}

impl PuiseuxSeries {
    /// Value on the `j`-th conjugate branch, `t = (z - p)^{1/λ} e^{2πij/λ}` with the principal root.
    pub fn eval(&self, z: Complex64, j: usize) -> Complex64 {
        let lambda = self.ramification as f64;
        let t = (z - self.branch_point).powf(1.0 / lambda) * Complex64::from_polar(1.0, TAU * j as f64 / lambda);
        self.terms.iter().map(|term| term.coefficient * t.powi(term.index as i32)).sum()
    }

    /// All `λ` conjugate values at `z`.
    pub fn eval_all(&self, z: Complex64) -> Vec<Complex64> {
        (0..self.ramification).map(|j| self.eval(z, j)).collect()
    }

    pub fn leading_exponent(&self) -> (i64, usize) {
        let g = gcd(self.leading_index.unsigned_abs() as usize, self.ramification).max(1);
        (self.leading_index / g as i64, self.ramification / g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One local sheet cycle with its full fitted Laurent series in `t`.
#[derive(Clone, Debug)]
pub(crate) struct LocalCycle {
    pub lambda: usize,
    pub sheets: Vec<usize>,
    pub rho: f64,
    /// `(n, c_n)` with `c_n = b_n ρ_t^n`, significant terms only, increasing `n`.
    pub scaled: Vec<(i64, Complex64)>,
    pub fit_residual: f64,
}

impl LocalCycle {
    pub fn rho_t(&self) -> f64 {
        self.rho.powf(1.0 / self.lambda as f64)
    }

    /// Unscaled coefficient `b_n`.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.scaled
            .iter()
            .find(|(m, _)| *m == n)
            .map_or(Complex64::new(0.0, 0.0), |(_, c)| c / self.rho_t().powi(n as i32))
    }
}

/// Fits every local cycle of component `k` at `p`.
pub(crate) fn local_cycles(tracker: &Tracker, k: usize, p: Complex64) -> Result<Vec<LocalCycle>> {
    let rho = local_radius(tracker.component_obstacles(k), p, tracker.settings().cluster);
    let comp = &tracker.numeric().components()[k];
    let base = p + rho;
    let mut roots = comp.roots(base, tracker.settings())?;
    let scale = roots.iter().map(|w| w.norm()).fold(1.0, f64::max);
    roots.sort_by(|a, b| snapped_cmp(*a, *b, scale));

    let (after, _) = tracker.track_component(k, &PathSpec::circle(p, rho), &roots)?;
    let perm = Permutation(
        after
            .iter()
            .map(|w| {
                roots
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - w).norm().total_cmp(&(b.1 - w).norm()))
                    .expect("nonempty")
                    .0
            })
            .collect(),
    );
    if !perm.is_valid() {
        return Err(Error::SheetCollision(p));
    }

    let mut out = Vec::new();
    for cycle in perm.cycles() {
        let lambda = cycle.len();
        let m = SAMPLES_PER_TURN * lambda;
        let step = TAU * lambda as f64 / (2 * m) as f64;
        let mut current = roots.clone();
        let mut z = base;
        let mut samples = Vec::with_capacity(2 * m);
        for _ in 0..2 * m {
            samples.push(current[cycle[0]]);
            let arc = PathSpec::new(z).arc(p, step);
            current = tracker.track_component(k, &arc, &current)?.0;
            z = arc.end();
        }
        let even: Vec<Complex64> = samples.iter().step_by(2).copied().collect();
        let half = (m / 2) as i64;
        let mut coeffs: Vec<(i64, Complex64)> = (-half..half)
            .map(|n| {
                let c: Complex64 = even
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * Complex64::from_polar(1.0, -TAU * (n * j as i64) as f64 / m as f64))
                    .sum();
                (n, c / m as f64)
            })
            .collect();
        let cmax = coeffs.iter().map(|c| c.1.norm()).fold(0.0, f64::max);
        coeffs.retain(|c| c.1.norm() > SIGNIFICANT * cmax.max(1e-300));
        let fit_residual = samples
            .iter()
            .enumerate()
            .skip(1)
            .step_by(2)
            .map(|(j, w)| {
                let theta = TAU * j as f64 / (2 * m) as f64;
                let s: Complex64 = coeffs.iter().map(|(n, c)| c * Complex64::from_polar(1.0, theta * *n as f64)).sum();
                (s - w).norm() / w.norm().max(1.0)
            })
            .fold(0.0, f64::max);
        if fit_residual > FIT_TOLERANCE {
            return Err(Error::ExpansionDiverged(fit_residual));
        }
        let sheets = cycle.clone();
        out.push(LocalCycle { lambda, sheets, rho, scaled: coeffs, fit_residual });
    }
    Ok(out)
}

fn truncate(cycle: &LocalCycle, n_terms: usize) -> (i64, Vec<PuiseuxTerm>) {
    let tau = cycle.scaled.iter().map(|t| t.0).find(|&n| n != 0).unwrap_or(1);
    let term = |n: i64| PuiseuxTerm { index: n, coefficient: cycle.coefficient(n) };
    let mut terms = Vec::new();
    if tau > 0 {
        terms.push(term(0));
        terms.extend((tau..).take(n_terms.saturating_sub(1)).map(term));
    } else {
        terms.extend((tau..).take(n_terms).map(term));
    }
    (tau, terms)
}

/// Truncated expansions of every sheet cycle of every coordinate at `point`.
/// `n_terms` counts the constant term (when the cycle is finite at `point`).
pub fn puiseux_expand(
    curve: &AlgebroidCurve,
    point: Complex64,
    n_terms: usize,
    settings: &NumericSettings,
) -> Result<Vec<PuiseuxSeries>> {
    let tracker = Tracker::for_disk(curve, point.norm() + 2.0 * point.norm().max(1.0), settings)?;
    puiseux_with(&tracker, point, n_terms)
}

pub(crate) fn puiseux_with(tracker: &Tracker, point: Complex64, n_terms: usize) -> Result<Vec<PuiseuxSeries>> {
    let mut out = Vec::new();
    for k in 0..tracker.numeric().components().len() {
        for cycle in local_cycles(tracker, k, point)? {
            let (leading_index, terms) = truncate(&cycle, n_terms);
            out.push(PuiseuxSeries {
                branch_point: point,
                coordinate: k,
                sheets: cycle.sheets.clone(),
                ramification: cycle.lambda,
                leading_index,
                terms,
                radius: cycle.rho,
                fit_residual: cycle.fit_residual,
            });
        }
    }
    Ok(out)
}
