//! Second-main-theorem bookkeeping on the flat plane: the slack
//! `D(r) = Σ N̄(r, H_j) - (q - 2ν - n + 1) T(r)` for `q` targets in general
//! position, and the defects `δ̄(H) = 1 - limsup N̄/T` estimated by slopes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::covering::{hyperplane_divisor, CoveringModel};
use crate::error::{Error, Result};
use crate::nevanlinna::{counting, fmt17, Functionals, HyperplaneTarget};

const RANK_TOLERANCE: f64 = 1e-10;
const MIN_CHARACTERISTIC: f64 = 5.0;
/// Allowance for slope-fit noise in the defect sum.
const DEFECT_SUM_SLACK: f64 = 0.1;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every `min(q, n+1)` of the coefficient vectors are linearly independent.
pub fn general_position_check(targets: &[HyperplaneTarget]) -> bool {
    let Some(first) = targets.first() else {
        return true;
    };
    let dim = first.dimension() + 1;
    if targets.iter().any(|t| t.dimension() + 1 != dim) {
        return false;
    }
    let k = targets.len().min(dim);
    combinations(targets.len(), k).into_iter().all(|subset| {
        let m = DMatrix::<Complex64>::from_fn(dim, k, |i, j| targets[subset[j]].coefficients()[i]);
        let sv = m.singular_values();
        let max = sv.max();
        max > 0.0 && sv.iter().all(|&s| s > RANK_TOLERANCE * max)
    })
}

#[derive(Clone, Debug)]
pub struct SmtConfig {
    pub targets: Vec<HyperplaneTarget>,
    pub delta: f64,
    pub r_grid: Vec<f64>,
    pub epsilon_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmtReport {
    pub sheet_count: usize,
    pub dimension: usize,
    pub q: usize,
    /// `q - 2ν - n + 1`.
    pub coefficient: i64,
    pub delta: f64,
    pub targets: Vec<String>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    /// `N̄(r, H_j)` per target.
    pub nbar: Vec<Vec<f64>>,
    /// `(q - 2ν - n + 1) T(r)`.
    pub lhs: Vec<f64>,
    /// `Σ_j N̄(r, H_j)`.
    pub rhs: Vec<f64>,
    pub slack: Vec<f64>,
    /// `D(r)/T(r)`, zero where `T` vanishes.
    pub normalized_slack: Vec<f64>,
    /// Smallest normalized slack over the top decile of the grid.
    pub top_decile_min: f64,
    /// Nonnegative constants of `D ≥ -C₁ (log(1+T) + δ log r) - C₂` fitted on the violated part.
    pub c1: f64,
    pub c2: f64,
    /// Largest remaining violation after subtracting the fitted error term.
    pub fit_excess: f64,
    pub epsilon_margin: f64,
    pub passed: bool,
}

/// Minimizes `Σ (y - c1 x - c2)²` over `c1, c2 ≥ 0`.
fn nnls2(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (0.0, 0.0);
    }
    let sse = |c1: f64, c2: f64| x.iter().zip(y).map(|(a, b)| (b - c1 * a - c2).powi(2)).sum::<f64>();
    let mut candidates = vec![(0.0, 0.0)];
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx > 0.0 {
        let c1 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
        candidates.push((c1, my - c1 * mx));
    }
    candidates.push((0.0, my));
    let xx: f64 = x.iter().map(|a| a * a).sum();
    if xx > 0.0 {
        candidates.push((x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / xx, 0.0));
    }
    candidates
        .into_iter()
        .filter(|&(a, b)| a >= 0.0 && b >= 0.0)
        .min_by(|a, b| sse(a.0, a.1).total_cmp(&sse(b.0, b.1)))
        .expect("origin is feasible")
}

fn truncated_counts(model: &CoveringModel, targets: &[HyperplaneTarget], r_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    let nu = model.sheet_count();
    targets
        .iter()
        .map(|t| {
            let div = hyperplane_divisor(model, t)?;
            r_grid.iter().map(|&r| counting(&div, nu, r, true)).collect()
        })
        .collect()
}

pub fn smt_margin(model: &CoveringModel, config: &SmtConfig) -> Result<SmtReport> {
    if !general_position_check(&config.targets) {
        return Err(Error::DegenerateTargets);
    }
    if let Some(t) = config.targets.iter().find(|t| t.dimension() != model.curve().dimension()) {
        return Err(Error::invalid(format!("target {} lives in the wrong projective space", t.label())));
    }
    let r = &config.r_grid;
    if r.is_empty() {
        return Err(Error::invalid("empty radius grid"));
    }
    let nu = model.sheet_count();
    let n = model.curve().dimension();
    let q = config.targets.len();
    let coefficient = q as i64 - 2 * nu as i64 - n as i64 + 1;
    let t = Functionals::new(model).characteristic_grid(r)?;
    let nbar = truncated_counts(model, &config.targets, r)?;
    let lhs: Vec<f64> = t.iter().map(|x| coefficient as f64 * x).collect();
    let rhs: Vec<f64> = (0..r.len()).map(|k| nbar.iter().map(|c| c[k]).sum()).collect();
    let slack: Vec<f64> = rhs.iter().zip(&lhs).map(|(a, b)| a - b).collect();
    let normalized_slack: Vec<f64> = slack.iter().zip(&t).map(|(d, t)| if *t > 0.0 { d / t } else { 0.0 }).collect();
    let start = (r.len() * 9 / 10).min(r.len() - 1);
    let top_decile_min = normalized_slack[start..].iter().copied().fold(f64::INFINITY, f64::min);

    let error_shape: Vec<f64> = (0..r.len()).map(|k| (1.0 + t[k]).ln() + config.delta * r[k].ln().max(0.0)).collect();
    let violated: Vec<usize> = (0..r.len()).filter(|&k| slack[k] < 0.0).collect();
    let xs: Vec<f64> = violated.iter().map(|&k| error_shape[k]).collect();
    let ys: Vec<f64> = violated.iter().map(|&k| -slack[k]).collect();
    let (c1, c2) = nnls2(&xs, &ys);
    let fit_excess = (0..r.len()).map(|k| -slack[k] - c1 * error_shape[k] - c2).fold(0.0, f64::max);

    Ok(SmtReport {
        sheet_count: nu,
        dimension: n,
        q,
        coefficient,
        delta: config.delta,
        targets: config.targets.iter().map(|t| t.label().to_string()).collect(),
        r: r.clone(),
        t,
        nbar,
        lhs,
        rhs,
        slack,
        normalized_slack,
        top_decile_min,
        c1,
        c2,
        fit_excess,
        epsilon_margin: config.epsilon_margin,
        passed: top_decile_min >= -config.epsilon_margin,
    })
}

impl SmtReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,T");
        for i in 0..self.q {
            out.push_str(&format!(",Nbar_target_{}", i + 1));
        }
        out.push_str(",lhs,rhs,slack,normalized_slack\n");
        for k in 0..self.r.len() {
            let mut row = vec![fmt17(self.r[k]), fmt17(self.t[k])];
            row.extend(self.nbar.iter().map(|c| fmt17(c[k])));
            row.extend([self.lhs[k], self.rhs[k], self.slack[k], self.normalized_slack[k]].map(fmt17));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectTable {
    pub targets: Vec<String>,
    /// `1 - slope` before clamping.
    pub raw: Vec<f64>,
    pub defects: Vec<f64>,
    pub sum: f64,
    /// `2ν + n - 1`.
    pub bound: usize,
    /// Targets with `N̄ ≡ 0` on the whole grid.
    pub omitted: Vec<bool>,
    /// `2ν` for curves into the projective line.
    pub omitted_bound: Option<usize>,
    pub within_bounds: bool,
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx
}

/// `δ̄(H) = 1 - (slope of N̄ against T over the top half of the grid)`, clamped to `[0, 1]`.
pub fn defects(model: &CoveringModel, targets: &[HyperplaneTarget], r_grid: &[f64]) -> Result<DefectTable> {
    if r_grid.len() < 4 {
        return Err(Error::invalid("need at least four radii to fit slopes"));
    }
    let t = Functionals::new(model).characteristic_grid(r_grid)?;
    let tmax = t.iter().copied().fold(0.0, f64::max);
    if tmax < MIN_CHARACTERISTIC {
        return Err(Error::NotTranscendentalEnough(tmax));
    }
    let nbar = truncated_counts(model, targets, r_grid)?;
    let half = r_grid.len() / 2;
    let raw: Vec<f64> = nbar.iter().map(|c| 1.0 - slope(&t[half..], &c[half..])).collect();
    let defects: Vec<f64> = raw.iter().map(|d| d.clamp(0.0, 1.0)).collect();
    let sum = defects.iter().sum();
    let nu = model.sheet_count();
    let n = model.curve().dimension();
    let bound = 2 * nu + n - 1;
    let omitted: Vec<bool> = nbar.iter().map(|c| c.iter().all(|&x| x == 0.0)).collect();
    let omitted_bound = (n == 1).then_some(2 * nu);
    let omitted_count = omitted.iter().filter(|&&o| o).count();
    let within_bounds = sum <= bound as f64 + DEFECT_SUM_SLACK && omitted_bound.map_or(true, |b| omitted_count <= b);
    Ok(DefectTable {
        targets: targets.iter().map(|t| t.label().to_string()).collect(),
        raw,
        defects,
        sum,
        bound,
        omitted,
        omitted_bound,
        within_bounds,
    })
}
