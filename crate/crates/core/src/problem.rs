//! The JSON problem file: a curve, the disk it is studied on, a radius grid,
//! targets, tolerances and the seed of every randomized choice.
//!
//! ```json
//! {
//!   "curve": { "backend": "exact", "components": [["1-z", "0", "1"]] },
//!   "disk_radius": 120,
//!   "base_point": "0",
//!   "r_grid": { "rmin": 2, "rmax": 100, "steps": 30 },
//!   "targets": ["value:0", "value:2+i", "inf"],
//!   "tolerances": { "quadrature": 1e-9, "epsilon_margin": 0.05 },
//!   "delta": 0.05,
//!   "seed": 7
//! }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::defining::{AlgebroidCurve, DefiningPolynomial};
use crate::error::{Error, Result};
use crate::field::{parse_complex, Backend};
use crate::nevanlinna::{log_grid, HyperplaneTarget};
use crate::settings::NumericSettings;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub backend: Backend,
    /// Coefficients `A_0 … A_ν` of each coordinate's defining polynomial.
    pub components: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusGrid {
    pub rmin: f64,
    pub rmax: f64,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub quadrature: f64,
    pub separation: f64,
    pub cluster: f64,
    pub min_clearance: f64,
    pub epsilon_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = NumericSettings::default();
        Self {
            quadrature: s.quadrature,
            separation: s.separation,
            cluster: s.cluster,
            min_clearance: s.min_clearance,
            epsilon_margin: 0.05,
        }
    }
}

fn default_delta() -> f64 {
    0.05
}

fn default_base_point() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub curve: CurveSpec,
    pub disk_radius: f64,
    /// Reference point of the Nevanlinna functionals; the curve is recentered there.
    #[serde(default = "default_base_point")]
    pub base_point: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<RadiusGrid>,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemFile {
    /// Parses and validates; syntax errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let positive = [t.quadrature, t.separation, t.cluster, t.min_clearance, t.epsilon_margin, self.disk_radius];
        if positive.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::invalid("tolerances and the disk radius must be positive"));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::invalid("delta must be nonnegative"));
        }
        if let Some(g) = self.r_grid {
            log_grid(g.rmin, g.rmax, g.steps)?;
            if g.rmax > self.disk_radius {
                return Err(Error::invalid("rmax lies outside the disk"));
            }
        }
        self.curve()?;
        self.base_point()?;
        self.targets()?;
        Ok(())
    }

    pub fn curve(&self) -> Result<AlgebroidCurve> {
        let comps = self
            .curve
            .components
            .iter()
            .map(|c| DefiningPolynomial::parse(c, self.curve.backend))
            .collect::<Result<Vec<_>>>()?;
        AlgebroidCurve::new(comps)
    }

    pub fn base_point(&self) -> Result<Complex64> {
        parse_complex(&self.base_point)
    }

    /// The curve in the coordinate `z - base_point`.
    pub fn centered_curve(&self) -> Result<AlgebroidCurve> {
        let c = self.curve()?;
        let z0 = self.base_point()?;
        if z0 == Complex64::new(0.0, 0.0) {
            Ok(c)
        } else {
            c.shifted(z0)
        }
    }

    pub fn settings(&self) -> NumericSettings {
        let t = &self.tolerances;
        NumericSettings {
            quadrature: t.quadrature,
            separation: t.separation,
            cluster: t.cluster,
            min_clearance: t.min_clearance,
            ..NumericSettings::from_seed(self.seed)
        }
    }

    pub fn radii(&self) -> Result<Vec<f64>> {
        let g = self.r_grid.ok_or_else(|| Error::invalid("the problem has no r_grid"))?;
        log_grid(g.rmin, g.rmax, g.steps)
    }

    pub fn targets(&self) -> Result<Vec<HyperplaneTarget>> {
        let n = self.curve.components.len();
        self.targets.iter().map(|t| HyperplaneTarget::parse(t, n)).collect()
    }
}
