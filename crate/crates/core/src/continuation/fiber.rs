use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::defining::{AlgebroidCurve, NumericCurve};
use crate::error::{Error, Result};
use crate::roots::snapped_cmp;
use crate::settings::NumericSettings;

/// The `ν` points over `base_point`, each a tuple `(w_1, …, w_d)`, in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fiber {
    pub base_point: Complex64,
    pub values: Vec<Vec<Complex64>>,
}

impl Fiber {
    /// Cartesian product of per-component roots, canonically sorted.
    pub fn from_components(base_point: Complex64, roots: &[Vec<Complex64>]) -> Self {
        let mut values: Vec<Vec<Complex64>> = vec![vec![]];
        for comp in roots {
            values = values
                .iter()
                .flat_map(|prefix| {
                    comp.iter().map(move |w| {
                        let mut t = prefix.clone();
                        t.push(*w);
                        t
                    })
                })
                .collect();
        }
        let mut f = Self { base_point, values };
        f.sort_canonical();
        f
    }

    pub fn sheet_count(&self) -> usize {
        self.values.len()
    }

    fn scale(&self) -> f64 {
        self.values.iter().flatten().map(|w| w.norm()).fold(1.0, f64::max)
    }

    /// Lexicographic by real then imaginary part per coordinate, insensitive
    /// to rounding noise below `1e-9` of the fiber's scale.
    pub fn sort_canonical(&mut self) {
        let scale = self.scale();
        self.values.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| snapped_cmp(*x, *y, scale))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    /// Index of the tuple nearest to `t` (max-norm over coordinates, relative).
    pub fn nearest(&self, t: &[Complex64]) -> (usize, f64) {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, tuple_distance(v, t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty fiber")
    }

    /// Distinct values of coordinate `k`, in order of first appearance.
    pub fn coordinate_values(&self, k: usize, tol: f64) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for t in &self.values {
            let w = t[k];
            if !out.iter().any(|u| (u - w).norm() <= tol * w.norm().max(1.0)) {
                out.push(w);
            }
        }
        out
    }

    /// Hausdorff distance between the fibers as point sets.
    pub fn set_distance(&self, other: &Fiber) -> f64 {
        let one = |a: &Fiber, b: &Fiber| a.values.iter().map(|t| b.nearest(t).1).fold(0.0, f64::max);
        one(self, other).max(one(other, self))
    }
}

pub(crate) fn tuple_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(1.0))
        .fold(0.0, f64::max)
}

pub(crate) fn solve_numeric(curve: &NumericCurve, z: Complex64, settings: &NumericSettings) -> Result<Fiber> {
    let roots = curve
        .components()
        .iter()
        .map(|c| c.roots(z, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fiber::from_components(z, &roots))
}

/// All `ν` points over a regular `z`.
pub fn solve_fiber(curve: &AlgebroidCurve, z: Complex64, settings: &NumericSettings) -> Result<Fiber> {
    if !z.is_finite() {
        return Err(Error::invalid("non-finite base point"));
    }
    solve_numeric(&curve.numeric()?, z, settings)
}
