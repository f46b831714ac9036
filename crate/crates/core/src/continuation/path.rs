use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One piece of a path, relative to the point where the previous piece ended.
/// Serialized as `{"type": "line", "to": [re, im]}` or
/// `{"type": "arc", "center": [re, im], "angle": θ}` (radians, positive is counterclockwise).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Segment {
    Line { to: Complex64 },
    Arc { center: Complex64, angle: f64 },
}

/// A segment with its start point resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Line { from: Complex64, to: Complex64 },
    Arc { from: Complex64, center: Complex64, angle: f64 },
}

impl Piece {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Line { from, to } => from + (to - from) * s,
            Piece::Arc { from, center, angle } => center + (from - center) * Complex64::from_polar(1.0, angle * s),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Piece::Line { to, .. } => to,
            Piece::Arc { from, angle, .. } if (angle / std::f64::consts::TAU).fract() == 0.0 => from,
            _ => self.point(1.0),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { from, center, angle } => angle.abs() * (from - center).norm(),
        }
    }

    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Line { from, to } => Piece::Line { from: to, to: from },
            Piece::Arc { center, angle, .. } => Piece::Arc { from: self.end(), center, angle: -angle },
        }
    }

    /// Euclidean distance from `p` to the piece.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Piece::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = (((p - from) * d.conj()).re / len2).clamp(0.0, 1.0);
                (p - (from + d * t)).norm()
            }
            Piece::Arc { from, center, angle } => {
                let rho = (from - center).norm();
                let rel = p - center;
                let a0 = (from - center).arg();
                // Fraction of the sweep at which the ray through p is reached.
                let mut phi = rel.arg() - a0;
                if angle < 0.0 {
                    phi = -phi;
                }
                phi = phi.rem_euclid(std::f64::consts::TAU);
                let endpoint = (p - from).norm().min((p - self.end()).norm());
                if phi <= angle.abs() {
                    (rel.norm() - rho).abs().min(endpoint)
                } else {
                    endpoint
                }
            }
        }
    }
}

/// A piecewise-smooth path `γ: [0, 1] → ℂ` built from lines and arcs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub start: Complex64,
    pub segments: Vec<Segment>,
    /// Required distance to the critical set; 0 disables the check.
    #[serde(default)]
    pub min_clearance: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PathFile {
    Segments(Vec<Segment>),
    Full {
        start: Option<Complex64>,
        segments: Vec<Segment>,
        #[serde(default)]
        min_clearance: f64,
    },
}

impl PathSpec {
    pub fn new(start: Complex64) -> Self {
        Self { start, segments: Vec::new(), min_clearance: 0.0 }
    }

    pub fn line_to(mut self, to: Complex64) -> Self {
        self.segments.push(Segment::Line { to });
        self
    }

    pub fn arc(mut self, center: Complex64, angle: f64) -> Self {
        self.segments.push(Segment::Arc { center, angle });
        self
    }

    /// Counterclockwise circle of the given radius around `center`, starting at its east point.
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Self::new(center + radius).arc(center, std::f64::consts::TAU)
    }

    /// Parses either a bare segment list or an object with `start`,
    /// `segments` and `min_clearance`. `default_start` is used when the file
    /// gives no start point.
    pub fn from_json(text: &str, default_start: Option<Complex64>) -> Result<Self> {
        let file: PathFile = serde_json::from_str(text).map_err(|e| Error::invalid(format!("path file: {e}")))?;
        let (start, segments, min_clearance) = match file {
            PathFile::Segments(s) => (None, s, 0.0),
            PathFile::Full { start, segments, min_clearance } => (start, segments, min_clearance),
        };
        let start = start.or(default_start).ok_or_else(|| Error::invalid("path has no start point"))?;
        Ok(Self { start, segments, min_clearance })
    }

    pub fn pieces(&self) -> Vec<Piece> {
        let mut at = self.start;
        self.segments
            .iter()
            .map(|s| {
                let p = match *s {
                    Segment::Line { to } => Piece::Line { from: at, to },
                    Segment::Arc { center, angle } => Piece::Arc { from: at, center, angle },
                };
                at = p.end();
                p
            })
            .collect()
    }

    pub fn end(&self) -> Complex64 {
        self.pieces().last().map_or(self.start, Piece::end)
    }

    pub fn length(&self) -> f64 {
        self.pieces().iter().map(Piece::length).sum()
    }

    pub fn reversed(&self) -> Self {
        let pieces = self.pieces();
        let segments = pieces
            .iter()
            .rev()
            .map(|p| match p.reversed() {
                Piece::Line { to, .. } => Segment::Line { to },
                Piece::Arc { center, angle, .. } => Segment::Arc { center, angle },
            })
            .collect();
        Self { start: self.end(), segments, min_clearance: self.min_clearance }
    }

    /// Concatenation; `next` must start where `self` ends.
    pub fn then(mut self, next: &PathSpec) -> Self {
        self.segments.extend(next.segments.iter().cloned());
        self
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        let pieces = self.pieces();
        if pieces.is_empty() {
            return (p - self.start).norm();
        }
        pieces.iter().map(|q| q.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Largest `|z|` on the path.
    pub fn max_modulus(&self) -> f64 {
        let mut m = self.start.norm();
        for p in self.pieces() {
            m = m.max(p.end().norm());
            if let Piece::Arc { from, center, .. } = p {
                m = m.max(center.norm() + (from - center).norm());
            }
        }
        m
    }

    /// `n + 1` points per piece, for plotting.
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        let mut out = vec![self.start];
        for p in self.pieces() {
            out.extend((1..=n).map(|k| p.point(k as f64 / n as f64)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let p = PathSpec::from_json(r#"[{"type":"line","to":[0,1]},{"type":"arc","center":[0,0],"angle":1.5707963267948966}]"#, Some(Complex64::new(1.0, 0.0))).unwrap();
        assert_eq!(p.segments.len(), 2);
        assert!((p.end() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let q = PathSpec::from_json(r#"{"start":[2,0],"segments":[{"type":"line","to":[3,0]}],"min_clearance":0.1}"#, None).unwrap();
        assert_eq!(q.min_clearance, 0.1);
        assert!(PathSpec::from_json("[]", None).is_err());
    }

    #[test]
    fn reversal_retraces() {
        let p = PathSpec::new(Complex64::new(1.0, 0.0)).arc(Complex64::new(0.0, 0.0), 2.0).line_to(Complex64::new(0.0, 3.0));
        let r = p.reversed();
        assert_eq!(r.start, p.end());
        assert!((r.end() - p.start).norm() < 1e-15);
    }

    #[test]
    fn distances() {
        let arc = PathSpec::new(Complex64::new(1.0, 0.0)).arc(Complex64::new(0.0, 0.0), std::f64::consts::PI);
        assert!((arc.distance_to(Complex64::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((arc.distance_to(Complex64::new(0.0, 2.0)) - 1.0).abs() < 1e-15);
        // lower half plane is not swept
        assert!((arc.distance_to(Complex64::new(0.0, -2.0)) - 5f64.sqrt()).abs() < 1e-15);
    }
}
