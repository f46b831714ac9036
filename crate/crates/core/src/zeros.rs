//! Zeros of analytic functions in a disk, by the argument principle on a
//! recursive subdivision of the enclosing square.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ZeroSearch {
    /// Boxes narrower than this (relative to `max(1, |center|)`) are resolved by Newton.
    pub newton_width: f64,
    /// Boxes narrower than this are reported as a cluster of the winding multiplicity.
    pub min_width: f64,
    pub max_boxes: usize,
}

impl Default for ZeroSearch {
    fn default() -> Self {
        Self { newton_width: 1e-2, min_width: 1e-10, max_boxes: 20_000 }
    }
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    y0: f64,
    wx: f64,
    wy: f64,
}

impl Rect {
    fn center(&self) -> Complex64 {
        Complex64::new(self.x0 + self.wx / 2.0, self.y0 + self.wy / 2.0)
    }

    fn width(&self) -> f64 {
        self.wx.max(self.wy)
    }

    fn corners(&self) -> [Complex64; 4] {
        let (x0, y0, x1, y1) = (self.x0, self.y0, self.x0 + self.wx, self.y0 + self.wy);
        [Complex64::new(x0, y0), Complex64::new(x1, y0), Complex64::new(x1, y1), Complex64::new(x0, y1)]
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x0 - slack
            && z.re <= self.x0 + self.wx + slack
            && z.im >= self.y0 - slack
            && z.im <= self.y0 + self.wy + slack
    }

    fn quadrants(&self, t: f64) -> [Rect; 4] {
        let (ax, ay) = (self.wx * t, self.wy * t);
        let (bx, by) = (self.wx - ax, self.wy - ay);
        [
            Rect { x0: self.x0, y0: self.y0, wx: ax, wy: ay },
            Rect { x0: self.x0 + ax, y0: self.y0, wx: bx, wy: ay },
            Rect { x0: self.x0, y0: self.y0 + ay, wx: ax, wy: by },
            Rect { x0: self.x0 + ax, y0: self.y0 + ay, wx: bx, wy: by },
        ]
    }
}

struct OnBoundary;

/// Value and logarithmic derivative `f'/f` (central difference).
type Sample = (Complex64, Complex64);

fn edge_winding<F>(f: &F, a: Complex64, b: Complex64) -> std::result::Result<f64, OnBoundary>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let value = |z: Complex64| -> std::result::Result<Complex64, OnBoundary> {
        match f(z) {
            Ok(v) if v.is_finite() && v != Complex64::new(0.0, 0.0) => Ok(v),
            _ => Err(OnBoundary),
        }
    };
    let h = 1e-6 * (b - a).norm() / N0 as f64;
    let eval = |z: Complex64| -> std::result::Result<Sample, OnBoundary> {
        let v = value(z)?;
        let d = (value(z + h)? - value(z - h)?) / (2.0 * h);
        Ok((v, d / v))
    };
    const N0: usize = 16;
    let mut total = 0.0;
    let mut prev = eval(a)?;
    for k in 1..=N0 {
        let t0 = (k - 1) as f64 / N0 as f64;
        let t1 = k as f64 / N0 as f64;
        let za = a + (b - a) * t0;
        let zb = a + (b - a) * t1;
        let fb = eval(zb)?;
        total += refine(&eval, za, zb, prev, fb, 0)?;
        prev = fb;
    }
    Ok(total)
}

/// Phase change of `f` from `za` to `zb`. A step is accepted when both the
/// observed phase change and the rotation predicted by `f'/f` at either end
/// are small, so whole turns between samples cannot alias to zero.
fn refine<E>(eval: &E, za: Complex64, zb: Complex64, fa: Sample, fb: Sample, depth: usize) -> std::result::Result<f64, OnBoundary>
where
    E: Fn(Complex64) -> std::result::Result<Sample, OnBoundary>,
{
    let d = (fb.0 / fa.0).arg();
    let dz = zb - za;
    let predicted = (fa.1 * dz).norm().max((fb.1 * dz).norm());
    if d.abs() < 0.5 && predicted < 1.0 {
        return Ok(d);
    }
    if depth > 44 {
        return Err(OnBoundary);
    }
    let zm = (za + zb) * 0.5;
    let fm = eval(zm)?;
    Ok(refine(eval, za, zm, fa, fm, depth + 1)? + refine(eval, zm, zb, fm, fb, depth + 1)?)
}

fn winding<F>(f: &F, sq: &Rect) -> std::result::Result<i64, OnBoundary>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let c = sq.corners();
    let mut total = 0.0;
    for k in 0..4 {
        total += edge_winding(f, c[k], c[(k + 1) % 4])?;
    }
    let turns = total / std::f64::consts::TAU;
    let n = turns.round();
    if (turns - n).abs() > 0.1 {
        return Err(OnBoundary);
    }
    Ok(n as i64)
}

fn newton<F>(f: &F, mut z: Complex64, mult: usize) -> Option<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    for _ in 0..60 {
        let fz = f(z).ok()?;
        if fz == Complex64::new(0.0, 0.0) {
            return Some(z);
        }
        let h = 1e-7 * z.norm().max(1.0);
        let d = (f(z + h).ok()? - f(z - h).ok()?) / (2.0 * h);
        let step = mult as f64 * fz / d;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    Some(z)
}

/// Zeros of `f` with multiplicities in the disk `|z - center| < radius`.
/// `f` must be analytic (no poles) on a neighbourhood of the enclosing square.
pub fn zeros_in_disk<F>(f: F, center: Complex64, radius: f64, opts: &ZeroSearch) -> Result<Vec<(Complex64, usize)>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut found = None;
    for attempt in 0..8 {
        // A slightly irrational enlargement keeps symmetric zeros off the edges.
        let half = radius * (1.013_7 + 0.003 * attempt as f64);
        let rect = Rect { x0: center.re - half, y0: center.im - half * 0.998_3, wx: 2.0 * half, wy: 2.0 * half * 0.998_3 };
        if let Ok(w) = winding(&f, &rect) {
            found = Some((rect, w));
            break;
        }
    }
    let (root, w0) = found.ok_or_else(|| Error::RootFindingFailure("zero on the search boundary".into()))?;
    if w0 < 0 {
        return Err(Error::RootFindingFailure("negative winding: function has poles".into()));
    }
    let mut out = Vec::new();
    let mut stack = vec![(root, w0)];
    let mut boxes = 0usize;
    while let Some((rect, w)) = stack.pop() {
        if w == 0 {
            continue;
        }
        boxes += 1;
        if boxes > opts.max_boxes {
            return Err(Error::RootFindingFailure(format!("box budget {} exhausted", opts.max_boxes)));
        }
        let scale = rect.center().norm().max(1.0);
        if w == 1 && rect.width() < opts.newton_width * scale {
            if let Some(z) = newton(&f, rect.center(), 1).filter(|&z| rect.contains(z, 1e-12 * scale)) {
                out.push((z, 1));
                continue;
            }
        }
        if rect.width() < opts.min_width * scale {
            let z = newton(&f, rect.center(), w as usize)
                .filter(|&z| rect.contains(z, rect.width()))
                .unwrap_or(rect.center());
            out.push((z, w as usize));
            continue;
        }
        let mut split = None;
        for t in [0.5, 0.4871, 0.5217, 0.4537, 0.5561] {
            let quads = rect.quadrants(t);
            let windings: std::result::Result<Vec<i64>, OnBoundary> = quads.iter().map(|q| winding(&f, q)).collect();
            if let Ok(ws) = windings {
                if ws.iter().sum::<i64>() == w && ws.iter().all(|&x| x >= 0) {
                    split = Some(quads.into_iter().zip(ws).collect::<Vec<_>>());
                    break;
                }
            }
        }
        let split = split.ok_or_else(|| Error::RootFindingFailure(format!("could not subdivide box at {}", rect.center())))?;
        stack.extend(split.into_iter().filter(|(_, wk)| *wk > 0));
    }
    out.retain(|(z, _)| (z - center).norm() < radius);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_and_double_zeros() {
        let f = |z: Complex64| Ok((z - 0.3) * (z + Complex64::new(0.2, 1.1)).powi(2) * (z - 5.0));
        let mut zs = zeros_in_disk(f, Complex64::new(0.0, 0.0), 2.0, &ZeroSearch::default()).unwrap();
        zs.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(zs.len(), 2);
        assert!((zs[0].0 - 0.3).norm() < 1e-12 && zs[0].1 == 1);
        assert!((zs[1].0 + Complex64::new(0.2, 1.1)).norm() < 1e-6 && zs[1].1 == 2);
    }

    #[test]
    fn entire_transcendental_function() {
        // zeros at kπ for k = -3..=3
        let zs = zeros_in_disk(|z: Complex64| Ok(z.sin()), Complex64::new(0.0, 0.0), 10.0, &ZeroSearch::default()).unwrap();
        assert_eq!(zs.len(), 7);
        for (z, m) in zs {
            assert_eq!(m, 1);
            let k = (z.re / std::f64::consts::PI).round();
            assert!((z - k * std::f64::consts::PI).norm() < 1e-12);
        }
    }
}
