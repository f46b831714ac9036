use num_complex::Complex64;
use serde::Serialize;

use super::fiber::{solve_numeric, Fiber};
use super::path::{PathSpec, Piece};
use crate::defining::{critical_data, AlgebroidCurve, CriticalData, NumericComponent, NumericCurve};
use crate::error::{Error, Result};
use crate::roots::horner;
use crate::settings::NumericSettings;

#[derive(Clone, Debug, Serialize)]
pub struct TrackResult {
    pub end: Fiber,
    /// `sheet_map[j]` is the index in `end` reached from sheet `j` of the start fiber.
    pub sheet_map: Vec<usize>,
    pub steps: usize,
}

enum StepFailure {
    Retry,
    Collision,
}

/// Path tracker for one curve, holding the critical points that bound the step size.
#[derive(Clone, Debug)]
pub struct Tracker {
    curve: NumericCurve,
    obstacles: Vec<Vec<Complex64>>,
    all_obstacles: Vec<Complex64>,
    settings: NumericSettings,
}

impl Tracker {
    pub fn new(curve: &AlgebroidCurve, critical: &CriticalData, settings: &NumericSettings) -> Result<Self> {
        let obstacles = critical
            .per_component
            .iter()
            .map(|c| c.multiple_points.iter().chain(&c.leading_coeff_zeros).copied().collect())
            .collect();
        Ok(Self {
            curve: curve.numeric()?,
            obstacles,
            all_obstacles: critical.critical_points.clone(),
            settings: settings.clone(),
        })
    }

    /// A tracker whose critical set covers the disk `|z| < radius`.
    pub fn for_disk(curve: &AlgebroidCurve, radius: f64, settings: &NumericSettings) -> Result<Self> {
        Self::new(curve, &critical_data(curve, radius, settings)?, settings)
    }

    pub fn numeric(&self) -> &NumericCurve {
        &self.curve
    }

    pub fn settings(&self) -> &NumericSettings {
        &self.settings
    }

    pub fn obstacles(&self) -> &[Complex64] {
        &self.all_obstacles
    }

    pub fn component_obstacles(&self, k: usize) -> &[Complex64] {
        &self.obstacles[k]
    }

    pub fn solve(&self, z: Complex64) -> Result<Fiber> {
        solve_numeric(&self.curve, z, &self.settings)
    }

    fn step(&self, comp: &NumericComponent, z0: Complex64, z1: Complex64, roots: &[Complex64]) -> std::result::Result<Vec<Complex64>, StepFailure> {
        let dz = z1 - z0;
        let c0 = comp.coeffs_at(z0).map_err(|_| StepFailure::Retry)?;
        let d0 = comp.derivs_at(z0).map_err(|_| StepFailure::Retry)?;
        let c1 = comp.coeffs_at(z1).map_err(|_| StepFailure::Retry)?;
        let pred: Vec<Complex64> = roots
            .iter()
            .map(|&w| {
                let (_, pw) = horner(&c0, w);
                let pz = horner(&d0, w).0;
                w - pz / pw * dz
            })
            .collect();
        if pred.iter().any(|p| !p.is_finite()) {
            return Err(StepFailure::Retry);
        }
        let mut out = Vec::with_capacity(pred.len());
        for (i, &p) in pred.iter().enumerate() {
            let scale = p.norm().max(1.0);
            let mut w = p;
            let mut last = f64::INFINITY;
            for _ in 0..12 {
                let (f, fw) = horner(&c1, w);
                let delta = f / fw;
                if !delta.is_finite() {
                    return Err(StepFailure::Retry);
                }
                w -= delta;
                last = delta.norm();
                if last <= 1e-13 * scale {
                    break;
                }
            }
            if last > 1e-9 * scale {
                return Err(StepFailure::Retry);
            }
            let moved = (w - p).norm();
            let travel = (p - roots[i]).norm();
            if moved > 0.5 * travel + 1e-11 * scale {
                return Err(StepFailure::Retry);
            }
            let gap = pred
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min);
            if moved > 0.25 * gap {
                return Err(StepFailure::Retry);
            }
            out.push(w);
        }
        if crate::defining::min_separation(&out) < self.settings.separation {
            return Err(StepFailure::Collision);
        }
        Ok(out)
    }

    fn track_piece(&self, k: usize, piece: &Piece, roots: &mut Vec<Complex64>, steps: &mut usize) -> Result<()> {
        let comp = &self.curve.components()[k];
        let len = piece.length();
        if len == 0.0 {
            return Ok(());
        }
        let obstacles = &self.obstacles[k];
        let mut s = 0.0;
        let mut h: f64 = 0.05;
        let mut z = piece.point(0.0);
        while s < 1.0 {
            let clearance = obstacles.iter().map(|c| (z - c).norm()).fold(f64::INFINITY, f64::min);
            let max_dz = (clearance / 4.0).min(0.25 * z.norm().max(1.0));
            let mut h_eff = h.min(1.0 - s).min(max_dz / len);
            loop {
                if h_eff < 1e-14 {
                    return Err(Error::StepCollapse(h_eff * len));
                }
                let s1 = if s + h_eff >= 1.0 - 1e-15 { 1.0 } else { s + h_eff };
                let z1 = if s1 == 1.0 { piece.end() } else { piece.point(s1) };
                match self.step(comp, z, z1, roots) {
                    Ok(next) => {
                        *roots = next;
                        *steps += 1;
                        h = (2.0 * (s1 - s)).min(0.25);
                        s = s1;
                        z = z1;
                        break;
                    }
                    Err(StepFailure::Collision) => return Err(Error::SheetCollision(z)),
                    Err(StepFailure::Retry) => h_eff *= 0.5,
                }
            }
        }
        Ok(())
    }

    /// Continues the roots of component `k` along `path`, keeping their order.
    pub fn track_component(&self, k: usize, path: &PathSpec, roots: &[Complex64]) -> Result<(Vec<Complex64>, usize)> {
        let mut r = roots.to_vec();
        let mut steps = 0;
        for piece in path.pieces() {
            self.track_piece(k, &piece, &mut r, &mut steps)?;
        }
        Ok((r, steps))
    }

    pub fn check_clearance(&self, path: &PathSpec) -> Result<()> {
        if path.min_clearance <= 0.0 {
            return Ok(());
        }
        for &c in &self.all_obstacles {
            let d = path.distance_to(c);
            if d < path.min_clearance {
                return Err(Error::PathCrossesBranchSet { point: c, clearance: d });
            }
        }
        Ok(())
    }

    /// Continues every sheet of `start` along `path`.
    pub fn track(&self, path: &PathSpec, start: &Fiber) -> Result<TrackResult> {
        self.check_clearance(path)?;
        let d = self.curve.components().len();
        let mut steps = 0;
        let mut starts = Vec::with_capacity(d);
        let mut ends = Vec::with_capacity(d);
        for k in 0..d {
            let vals = start.coordinate_values(k, 1e-10);
            if vals.len() != self.curve.components()[k].degree() {
                return Err(Error::invalid(format!(
                    "start fiber has {} distinct values in coordinate {}, expected {}",
                    vals.len(),
                    k + 1,
                    self.curve.components()[k].degree()
                )));
            }
            let (end, n) = self.track_component(k, path, &vals)?;
            steps += n;
            starts.push(vals);
            ends.push(end);
        }
        let tuples: Vec<Vec<Complex64>> = start
            .values
            .iter()
            .map(|t| {
                (0..d)
                    .map(|k| {
                        let idx = starts[k]
                            .iter()
                            .enumerate()
                            .min_by(|a, b| (a.1 - t[k]).norm().total_cmp(&(b.1 - t[k]).norm()))
                            .expect("nonempty")
                            .0;
                        ends[k][idx]
                    })
                    .collect()
            })
            .collect();
        let mut end = Fiber { base_point: path.end(), values: tuples.clone() };
        end.sort_canonical();
        let sheet_map = tuples.iter().map(|t| end.nearest(t).0).collect();
        Ok(TrackResult { end, sheet_map, steps })
    }
}

/// Tracks `start` along `path`, locating the critical set first.
pub fn track(curve: &AlgebroidCurve, path: &PathSpec, start: &Fiber, settings: &NumericSettings) -> Result<TrackResult> {
    let tracker = Tracker::for_disk(curve, path.max_modulus() + 1.0, settings)?;
    tracker.track(path, start)
}
