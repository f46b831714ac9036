use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fiber::Fiber;
use super::path::{PathSpec, Piece};
use super::track::Tracker;
use crate::defining::{critical_data, AlgebroidCurve};
use crate::error::{Error, Result};
use crate::field::Backend;
use crate::settings::NumericSettings;

/// A permutation of `0..n`; `p[j]` is the image of `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` followed by `next`: `j ↦ next[self[j]]`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&j| next.0[j]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Cycles, each starting at its smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![];
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j);
                j = self.0[j];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based labels; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let labels: Vec<String> = c.iter().map(|j| (j + 1).to_string()).collect();
            write!(f, "({})", labels.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyPermutation {
    pub branch_point: Complex64,
    pub permutation: Permutation,
    pub loop_radius: f64,
    /// Where the loop (or lasso) starts; the permutation acts on the canonical fiber there.
    pub base_point: Complex64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchOrder {
    /// Number of cycles of the local monodromy.
    pub cycles: usize,
    pub cycle_lengths: Vec<usize>,
    /// `ν - l`, the order of the branch divisor.
    pub order: usize,
}

fn search_radius(center: Complex64, radius: f64) -> f64 {
    center.norm() + 1.5 * radius + 1.0
}

/// Monodromy of a counterclockwise circle of `radius` around `around`, based at its east point.
pub fn monodromy(
    curve: &AlgebroidCurve,
    around: Complex64,
    radius: f64,
    base_fiber: Option<&Fiber>,
    settings: &NumericSettings,
) -> Result<MonodromyPermutation> {
    let tracker = Tracker::for_disk(curve, search_radius(around, radius), settings)?;
    monodromy_with(&tracker, around, radius, base_fiber)
}

pub(crate) fn monodromy_with(
    tracker: &Tracker,
    around: Complex64,
    radius: f64,
    base_fiber: Option<&Fiber>,
) -> Result<MonodromyPermutation> {
    if radius <= 0.0 || !radius.is_finite() {
        return Err(Error::invalid("loop radius must be positive"));
    }
    let tol = tracker.settings().cluster;
    let clearance = tracker.settings().min_clearance * radius.max(1.0);
    let others: Vec<Complex64> = tracker
        .obstacles()
        .iter()
        .copied()
        .filter(|c| (c - around).norm() > tol * around.norm().max(1.0))
        .collect();
    for &c in &others {
        let d = (c - around).norm();
        if (d - radius).abs() < clearance {
            return Err(Error::PathCrossesBranchSet { point: c, clearance: (d - radius).abs() });
        }
    }
    let inside: Vec<Complex64> = others.iter().copied().filter(|c| (c - around).norm() < radius).collect();
    if !inside.is_empty() {
        return Err(Error::LoopContainsOtherBranchPoints { around, radius, others: inside });
    }
    let base = around + radius;
    let fiber = match base_fiber {
        Some(f) if (f.base_point - base).norm() <= 1e-12 * base.norm().max(1.0) => f.clone(),
        Some(f) => {
            return Err(Error::invalid(format!("base fiber is at {}, the loop starts at {base}", f.base_point)));
        }
        None => tracker.solve(base)?,
    };
    let result = tracker.track(&PathSpec::circle(around, radius), &fiber)?;
    Ok(MonodromyPermutation {
        branch_point: around,
        permutation: Permutation(result.sheet_map),
        loop_radius: radius,
        base_point: base,
    })
}

/// Loop radius for a local monodromy at `point`: half the distance to the
/// nearest other critical point, at most `0.5 * max(1, |point|)`.
pub(crate) fn local_radius(obstacles: &[Complex64], point: Complex64, tol: f64) -> f64 {
    let scale = point.norm().max(1.0);
    obstacles
        .iter()
        .filter(|c| (*c - point).norm() > tol * scale)
        .map(|c| 0.5 * (c - point).norm())
        .fold(0.5 * scale, f64::min)
}

pub fn branch_order(curve: &AlgebroidCurve, point: Complex64, settings: &NumericSettings) -> Result<BranchOrder> {
    let tracker = Tracker::for_disk(curve, search_radius(point, point.norm().max(1.0)), settings)?;
    branch_order_with(&tracker, point)
}

pub(crate) fn branch_order_with(tracker: &Tracker, point: Complex64) -> Result<BranchOrder> {
    let radius = local_radius(tracker.obstacles(), point, tracker.settings().cluster);
    let m = monodromy_with(tracker, point, radius, None)?;
    let cycle_lengths = m.permutation.cycle_type();
    let nu = m.permutation.len();
    Ok(BranchOrder { cycles: cycle_lengths.len(), order: nu - cycle_lengths.len(), cycle_lengths })
}

/// Monodromy generators from a common base point on the circle `|z - center| = radius`.
#[derive(Clone, Debug, Serialize)]
pub struct LassoSystem {
    pub center: Complex64,
    pub radius: f64,
    pub base_point: Complex64,
    pub base_fiber: Fiber,
    /// One lasso per puncture, in the order whose product is the boundary loop.
    pub generators: Vec<MonodromyPermutation>,
    /// Monodromy of the counterclockwise boundary circle.
    pub boundary: Permutation,
}

impl LassoSystem {
    /// `σ_1` followed by `σ_2` … followed by `σ_n`.
    pub fn product(&self) -> Permutation {
        self.generators
            .iter()
            .fold(Permutation::identity(self.base_fiber.sheet_count()), |acc, g| acc.then(&g.permutation))
    }

    /// The path of the lasso around `generators[i]`.
    pub fn lasso_path(&self, i: usize) -> PathSpec {
        lasso(self.base_point, self.generators[i].branch_point, self.generators[i].loop_radius)
    }
}

fn lasso(x0: Complex64, b: Complex64, rho: f64) -> PathSpec {
    let u = (x0 - b) / (x0 - b).norm();
    let q = b + u * rho;
    PathSpec::new(x0).line_to(q).arc(b, TAU).line_to(x0)
}

fn chord_score(x0: Complex64, points: &[Complex64]) -> f64 {
    let mut score = f64::INFINITY;
    for (i, &b) in points.iter().enumerate() {
        score = score.min((x0 - b).norm());
        let chord = Piece::Line { from: x0, to: b };
        for (j, &c) in points.iter().enumerate() {
            if i != j {
                score = score.min(chord.distance_to(c));
            }
        }
    }
    score
}

/// Builds lassos around every point of `punctures` (which must lie strictly
/// inside the circle) from a base point on the circle chosen to keep the
/// chords far from the other punctures.
pub(crate) fn lasso_system_with(
    tracker: &Tracker,
    center: Complex64,
    radius: f64,
    punctures: &[Complex64],
) -> Result<LassoSystem> {
    const CANDIDATES: usize = 256;
    let x0 = (0..CANDIDATES)
        .map(|k| center + Complex64::from_polar(radius, TAU * (k as f64 + 0.5) / CANDIDATES as f64))
        .map(|x| (x, chord_score(x, punctures)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates")
        .0;
    let inward = (center - x0) / radius;
    let mut order: Vec<(f64, Complex64)> =
        punctures.iter().map(|&b| (((b - x0) * inward.conj()).arg(), b)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let base_fiber = tracker.solve(x0)?;
    let mut generators = Vec::with_capacity(order.len());
    for &(_, b) in &order {
        let mut rho = 0.5 * (x0 - b).norm();
        for &c in punctures.iter().filter(|&&c| c != b) {
            rho = rho.min(0.5 * (c - b).norm());
            rho = rho.min(0.5 * Piece::Line { from: x0, to: c }.distance_to(b));
        }
        rho = rho.min(0.5 * (radius - (b - center).norm()));
        let path = lasso(x0, b, rho);
        let r = tracker.track(&path, &base_fiber)?;
        generators.push(MonodromyPermutation { branch_point: b, permutation: Permutation(r.sheet_map), loop_radius: rho, base_point: x0 });
    }
    let boundary_path = PathSpec::new(x0).arc(center, TAU);
    let boundary = Permutation(tracker.track(&boundary_path, &base_fiber)?.sheet_map);
    Ok(LassoSystem { center, radius, base_point: x0, base_fiber, generators, boundary })
}

/// Lasso generators around every critical point in `|z| < disk_radius`.
pub fn lasso_system(curve: &AlgebroidCurve, disk_radius: f64, settings: &NumericSettings) -> Result<LassoSystem> {
    let tracker = Tracker::for_disk(curve, disk_radius * 1.25, settings)?;
    let punctures = punctures_inside(&tracker, disk_radius)?;
    lasso_system_with(&tracker, Complex64::new(0.0, 0.0), disk_radius, &punctures)
}

pub(crate) fn punctures_inside(tracker: &Tracker, radius: f64) -> Result<Vec<Complex64>> {
    let margin = tracker.settings().min_clearance * radius.max(1.0);
    let mut out = Vec::new();
    for &c in tracker.obstacles() {
        if (c.norm() - radius).abs() < margin {
            return Err(Error::PathCrossesBranchSet { point: c, clearance: (c.norm() - radius).abs() });
        }
        if c.norm() < radius {
            out.push(c);
        }
    }
    Ok(out)
}

fn is_transitive(n: usize, generators: &[Permutation]) -> bool {
    let mut reached = vec![false; n];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(j) = stack.pop() {
        for g in generators {
            for k in [g.0[j], g.inverse().0[j]] {
                if !reached[k] {
                    reached[k] = true;
                    stack.push(k);
                }
            }
        }
    }
    reached.iter().all(|&r| r)
}

/// Whether the monodromy group of a single-component curve is transitive.
/// For the exact backend the disk is enlarged to contain every critical point.
pub fn is_irreducible(curve: &AlgebroidCurve, disk_radius: f64, settings: &NumericSettings) -> Result<bool> {
    if curve.dimension() != 1 {
        return Err(Error::invalid("irreducibility is decided per component"));
    }
    let nu = curve.sheet_count();
    if nu == 1 {
        return Ok(true);
    }
    let mut radius = disk_radius;
    if curve.backend() == Backend::Exact {
        let all = critical_data(curve, f64::INFINITY, settings)?;
        let outer = all.critical_points.iter().map(|c| c.norm()).fold(0.0, f64::max);
        radius = radius.max(1.25 * outer + 1.0);
    }
    let system = lasso_system(curve, radius, settings).map_err(|e| Error::Inconclusive(e.to_string()))?;
    let gens: Vec<Permutation> = system.generators.iter().map(|g| g.permutation.clone()).collect();
    Ok(is_transitive(nu, &gens))
}
