//! The finite covering of a disk defined by an algebroid curve: branch records
//! from lasso monodromy, evaluation on individual sheets, value divisors and
//! the discriminant-type divisors `J_k` that bound the branch divisor.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::continuation::{
    lasso_system_with, local_cycles, punctures_inside, Fiber, LassoSystem, PathSpec, Tracker,
};
use crate::defining::{alg_op, critical_data, AlgOp, AlgebroidCurve, CriticalData, DefiningPolynomial};
use crate::error::{Error, Result};
use crate::field::{Backend, GaussianRational, RationalFunction};
use crate::nevanlinna::{HyperplaneTarget, PointTarget};
use crate::roots::{exact_roots, snapped_cmp};
use crate::settings::NumericSettings;
use crate::zeros::{zeros_in_disk, ZeroSearch};

/// Local monodromy at one point with nontrivial branching.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchRecord {
    pub point: Complex64,
    pub cycle_lengths: Vec<usize>,
    /// `ν - l`, the number of sheets minus the number of cycles.
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchDivisor {
    pub points: Vec<(Complex64, usize)>,
}

impl BranchDivisor {
    pub fn degree(&self) -> usize {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn order_at(&self, z: Complex64, tol: f64) -> usize {
        self.points.iter().filter(|p| (p.0 - z).norm() <= tol).map(|p| p.1).sum()
    }
}

/// Points of the pullback of a target inside a disk, with multiplicities
/// summed over the sheets above each point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueDivisor {
    pub target: String,
    pub disk_radius: f64,
    pub points: Vec<(Complex64, usize)>,
}

impl ValueDivisor {
    pub fn degree(&self) -> usize {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn degree_within(&self, r: f64) -> usize {
        self.points.iter().filter(|p| p.0.norm() < r).map(|p| p.1).sum()
    }

    pub fn order_at(&self, z: Complex64, tol: f64) -> usize {
        self.points.iter().filter(|p| (p.0 - z).norm() <= tol).map(|p| p.1).sum()
    }
}

/// Combinatorial model of the covering over `|z| < disk_radius`.
#[derive(Clone, Debug)]
pub struct CoveringModel {
    curve: AlgebroidCurve,
    tracker: Tracker,
    critical: CriticalData,
    disk_radius: f64,
    lassos: LassoSystem,
    branch_records: Vec<BranchRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringReport {
    pub sheet_count: usize,
    pub disk_radius: f64,
    pub base_point: Complex64,
    pub base_fiber: Fiber,
    pub critical_points: Vec<Complex64>,
    pub branch_records: Vec<BranchRecord>,
    pub generators: Vec<GeneratorSummary>,
    pub boundary_cycle_type: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSummary {
    pub point: Complex64,
    pub permutation: Vec<usize>,
    pub cycle_type: Vec<usize>,
}

pub fn build_covering(curve: &AlgebroidCurve, disk_radius: f64, settings: &NumericSettings) -> Result<CoveringModel> {
    if !(disk_radius > 0.0 && disk_radius.is_finite()) {
        return Err(Error::invalid("disk radius must be positive and finite"));
    }
    let critical = critical_data(curve, disk_radius * 1.25, settings)?;
    let tracker = Tracker::new(curve, &critical, settings)?;
    let punctures = punctures_inside(&tracker, disk_radius)?;
    let lassos = lasso_system_with(&tracker, Complex64::new(0.0, 0.0), disk_radius, &punctures)?;
    let nu = curve.sheet_count();
    let branch_records = lassos
        .generators
        .iter()
        .filter_map(|g| {
            let cycle_lengths = g.permutation.cycle_type();
            let order = nu - cycle_lengths.len();
            (order > 0).then(|| BranchRecord { point: g.branch_point, cycle_lengths, order })
        })
        .collect();
    Ok(CoveringModel { curve: curve.clone(), tracker, critical, disk_radius, lassos, branch_records })
}

impl CoveringModel {
    pub fn curve(&self) -> &AlgebroidCurve {
        &self.curve
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }

    /// Critical data for the slightly larger disk the tracker was built on.
    pub fn critical(&self) -> &CriticalData {
        &self.critical
    }

    pub fn disk_radius(&self) -> f64 {
        self.disk_radius
    }

    pub fn sheet_count(&self) -> usize {
        self.curve.sheet_count()
    }

    pub fn base_point(&self) -> Complex64 {
        self.lassos.base_point
    }

    pub fn base_fiber(&self) -> &Fiber {
        &self.lassos.base_fiber
    }

    pub fn lassos(&self) -> &LassoSystem {
        &self.lassos
    }

    pub fn branch_records(&self) -> &[BranchRecord] {
        &self.branch_records
    }

    pub fn settings(&self) -> &NumericSettings {
        self.tracker.settings()
    }

    pub fn branch_divisor(&self) -> BranchDivisor {
        BranchDivisor { points: self.branch_records.iter().map(|b| (b.point, b.order)).collect() }
    }

    /// Critical points strictly inside the model disk.
    pub fn critical_points_inside(&self) -> Vec<Complex64> {
        self.critical.critical_points.iter().copied().filter(|c| c.norm() < self.disk_radius).collect()
    }

    pub fn report(&self) -> CoveringReport {
        CoveringReport {
            sheet_count: self.sheet_count(),
            disk_radius: self.disk_radius,
            base_point: self.base_point(),
            base_fiber: self.base_fiber().clone(),
            critical_points: self.critical_points_inside(),
            branch_records: self.branch_records.clone(),
            generators: self
                .lassos
                .generators
                .iter()
                .map(|g| GeneratorSummary {
                    point: g.branch_point,
                    permutation: g.permutation.0.clone(),
                    cycle_type: g.permutation.cycle_type(),
                })
                .collect(),
            boundary_cycle_type: self.lassos.boundary.cycle_type(),
        }
    }

    /// Path from the base point to `z`: radially to `|z|`, then along the circle.
    pub fn default_path(&self, z: Complex64) -> PathSpec {
        let x0 = self.base_point();
        let r = z.norm();
        if r < 1e-12 * self.disk_radius {
            return PathSpec::new(x0).line_to(z);
        }
        let mut path = PathSpec::new(x0);
        let turn = x0 * (r / x0.norm());
        if (turn - x0).norm() > 0.0 {
            path = path.line_to(turn);
        }
        let mut dphi = (z / turn).arg();
        if dphi <= -std::f64::consts::PI {
            dphi += TAU;
        }
        if dphi != 0.0 {
            path = path.arc(Complex64::new(0.0, 0.0), dphi);
        }
        path
    }

    /// Path from the base point to `z`: along the boundary circle, then radially inward.
    fn fallback_path(&self, z: Complex64) -> PathSpec {
        let x0 = self.base_point();
        let dphi = (z / x0).arg();
        let mut path = PathSpec::new(x0);
        if dphi != 0.0 {
            path = path.arc(Complex64::new(0.0, 0.0), dphi);
        }
        path.line_to(z)
    }

    /// Value of the lift on `sheet` (an index into the base fiber) at `z`,
    /// continued along `path_hint` (prefixed by the default path to its
    /// start) or along the default path.
    pub fn lift_evaluate(&self, sheet: usize, z: Complex64, path_hint: Option<&PathSpec>) -> Result<Vec<Complex64>> {
        let nu = self.sheet_count();
        if sheet >= nu {
            return Err(Error::invalid(format!("sheet {sheet} out of range 0..{nu}")));
        }
        let clearance = self.settings().min_clearance * self.disk_radius.max(1.0);
        let inside = |p: Complex64| p.norm() < self.disk_radius;
        let path = match path_hint {
            Some(hint) => {
                if !inside(hint.start) || (hint.end() - z).norm() > 1e-12 * z.norm().max(1.0) {
                    return Err(Error::invalid("path hint must start in the disk and end at z"));
                }
                let lead = self.route(hint.start, clearance)?;
                let mut hint = hint.clone();
                hint.min_clearance = clearance;
                self.tracker.check_clearance(&hint)?;
                lead.then(&hint)
            }
            None => self.route(z, clearance)?,
        };
        if path.max_modulus() > self.disk_radius * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("z = {z} is outside the model disk")));
        }
        let tracked = self.tracker.track(&path, self.base_fiber())?;
        Ok(tracked.end.values[tracked.sheet_map[sheet]].clone())
    }

    fn route(&self, z: Complex64, clearance: f64) -> Result<PathSpec> {
        if z.norm() > self.disk_radius * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("z = {z} is outside the model disk")));
        }
        let mut first = self.default_path(z);
        first.min_clearance = clearance;
        match self.tracker.check_clearance(&first) {
            Ok(()) => Ok(first),
            Err(err @ Error::PathCrossesBranchSet { .. }) => {
                let mut second = self.fallback_path(z);
                second.min_clearance = clearance;
                self.tracker.check_clearance(&second).map_err(|_| err)?;
                Ok(second)
            }
            Err(e) => Err(e),
        }
    }
}

fn exact_value(v: Complex64) -> Result<GaussianRational> {
    GaussianRational::from_complex(v).ok_or_else(|| Error::invalid(format!("target value {v} is not finite")))
}

fn sort_points(mut v: Vec<(Complex64, usize)>) -> Vec<(Complex64, usize)> {
    v.sort_by(|a, b| snapped_cmp(a.0, b.0, 1.0));
    v
}

/// Pullback of `target` inside `|z| < disk_radius`. For a single coordinate,
/// finite values come from the zeros of `Ψ(z, a)` and `∞` from the zeros of
/// `A_ν`. Hyperplanes in higher dimension need the exact backend and a model.
pub fn value_divisor(
    curve: &AlgebroidCurve,
    target: &HyperplaneTarget,
    disk_radius: f64,
    settings: &NumericSettings,
) -> Result<ValueDivisor> {
    if curve.dimension() != 1 {
        let model = build_covering(curve, disk_radius, settings)?;
        return hyperplane_divisor(&model, target);
    }
    let p = &curve.components()[0];
    let point = target.as_point().expect("one coordinate means points of the projective line");
    let points = match curve.backend() {
        Backend::Exact => {
            let b = p.bivariate()?;
            let poly = match point {
                PointTarget::Infinity => b.leading(),
                PointTarget::Finite(v) => b.eval_w(&exact_value(v)?),
            };
            if poly.is_zero() {
                return Err(Error::TargetDegenerate);
            }
            exact_roots(&poly, settings.start_angle)?.into_iter().filter(|(z, _)| z.norm() < disk_radius).collect()
        }
        Backend::Numeric => {
            let comp = crate::defining::NumericComponent::new(p)?;
            let f = |z: Complex64| -> Result<(Complex64, f64)> {
                let c = comp.coeffs_at(z)?;
                Ok(match point {
                    PointTarget::Infinity => (*c.last().expect("nonempty"), c.last().expect("nonempty").norm()),
                    PointTarget::Finite(v) => {
                        let scale = c.iter().rev().fold(0.0, |acc, a| acc * v.norm() + a.norm());
                        (crate::roots::horner(&c, v).0, scale)
                    }
                })
            };
            let probes = [0.31, 0.57, 0.83, 0.12, 0.66].iter().enumerate().map(|(k, s)| {
                Complex64::from_polar(s * disk_radius, 1.0 + 2.3 * k as f64)
            });
            let mut degenerate = true;
            for z in probes {
                let (v, scale) = f(z)?;
                if v.norm() > 1e-13 * scale {
                    degenerate = false;
                    break;
                }
            }
            if degenerate {
                return Err(Error::TargetDegenerate);
            }
            zeros_in_disk(|z| f(z).map(|v| v.0), Complex64::new(0.0, 0.0), disk_radius, &ZeroSearch::default())?
        }
    };
    Ok(ValueDivisor { target: target.label().to_string(), disk_radius, points: sort_points(points) })
}

/// One local sheet: `w = Σ b_n ζ^{conj·n} (z - p)^{n/λ}` with `ζ = e^{2πi/λ}`.
#[derive(Clone, Debug)]
struct LocalSheet {
    lambda: usize,
    conj: usize,
    terms: Vec<(i64, Complex64)>,
}

impl LocalSheet {
    fn pole_order(&self) -> f64 {
        let n = self.terms.first().map_or(0, |t| t.0);
        (-(n as f64) / self.lambda as f64).max(0.0)
    }
}

fn local_sheets(tracker: &Tracker, k: usize, p: Complex64) -> Result<(Vec<LocalSheet>, f64)> {
    let cycles = local_cycles(tracker, k, p)?;
    let nu = tracker.numeric().components()[k].degree();
    let mut out = vec![None; nu];
    let mut rho = f64::INFINITY;
    for c in &cycles {
        rho = rho.min(c.rho);
        let terms: Vec<(i64, Complex64)> = c.scaled.iter().map(|&(n, _)| (n, c.coefficient(n))).collect();
        for (j, &s) in c.sheets.iter().enumerate() {
            out[s] = Some(LocalSheet { lambda: c.lambda, conj: j, terms: terms.clone() });
        }
    }
    Ok((out.into_iter().map(|s| s.expect("cycles cover every sheet")).collect(), rho))
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Order at `p` of `constant + Σ a_i w_i`, measured with coefficients scaled
/// to the radius `rho`. `None` when the combination vanishes identically.
fn combination_order(constant: Complex64, terms: &[(Complex64, &LocalSheet)], rho: f64) -> Option<f64> {
    let l = terms.iter().fold(1, |acc, t| lcm(acc, t.1.lambda));
    let mut acc: BTreeMap<i64, Complex64> = BTreeMap::new();
    let mut scale = constant.norm();
    *acc.entry(0).or_default() += constant;
    for (a, s) in terms {
        let zeta = TAU / s.lambda as f64;
        for &(n, b) in &s.terms {
            let c = a * b * rho.powf(n as f64 / s.lambda as f64) * Complex64::from_polar(1.0, zeta * (s.conj as i64 * n) as f64);
            scale = scale.max(c.norm());
            *acc.entry(n * (l / s.lambda) as i64).or_default() += c;
        }
    }
    acc.iter().find(|(_, c)| c.norm() > 1e-7 * scale).map(|(e, _)| *e as f64 / l as f64)
}

fn round_order(x: f64, what: &str, p: Complex64) -> Result<usize> {
    let r = x.round();
    if (x - r).abs() > 1e-6 || r < -0.5 {
        return Err(Error::Inconclusive(format!("{what} at {p} came out as {x}, not a nonnegative integer")));
    }
    Ok(r as usize)
}

/// Cartesian product of sheet indices, one per component.
fn product_sheets(degrees: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in degrees {
        out = out.into_iter().flat_map(|t| (0..n).map(move |j| [t.clone(), vec![j]].concat())).collect();
    }
    out
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-8 * a.norm().max(1.0)
}

impl CoveringModel {
    fn is_obstacle(&self, k: usize, p: Complex64) -> bool {
        self.tracker.component_obstacles(k).iter().any(|&c| near(c, p))
    }

    /// Local sheets of every component at `p`, or only those of components
    /// critical at `p` when `all` is false (regular ones are `None`).
    fn local_data(&self, p: Complex64, all: bool) -> Result<(Vec<Option<Vec<LocalSheet>>>, f64)> {
        let d = self.curve.dimension();
        let mut rho = f64::INFINITY;
        let mut out = Vec::with_capacity(d);
        for k in 0..d {
            if all || self.is_obstacle(k, p) {
                let (s, r) = local_sheets(&self.tracker, k, p)?;
                rho = rho.min(r);
                out.push(Some(s));
            } else {
                out.push(None);
            }
        }
        Ok((out, rho))
    }

    fn pole_sum(&self, local: &[Option<Vec<LocalSheet>>]) -> f64 {
        let degrees: Vec<usize> = self.curve.components().iter().map(DefiningPolynomial::degree).collect();
        product_sheets(&degrees)
            .iter()
            .map(|t| {
                t.iter()
                    .enumerate()
                    .map(|(i, &j)| local[i].as_ref().map_or(0.0, |s| s[j].pole_order()))
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    /// `ord_p J_k` from local expansions: the pole part contributes
    /// `(2ν-2)` times the summed sheet pole orders, and each pair of distinct
    /// component sheets contributes `2 (ν/ν_k)^2 ord(w_a - w_b)`.
    pub fn jk_order(&self, k: usize, p: Complex64) -> Result<usize> {
        let d = self.curve.dimension();
        if k >= d {
            return Err(Error::invalid(format!("coordinate {k} out of range 0..{d}")));
        }
        if !(0..d).any(|i| self.is_obstacle(i, p)) {
            return Ok(0);
        }
        let (local, rho) = self.local_data(p, false)?;
        let nu = self.sheet_count() as f64;
        let nu_k = self.curve.components()[k].degree();
        let mut total = (2.0 * nu - 2.0) * self.pole_sum(&local);
        if let Some(sheets) = &local[k] {
            let rep = nu / nu_k as f64;
            let one = Complex64::new(1.0, 0.0);
            for a in 0..nu_k {
                for b in a + 1..nu_k {
                    if let Some(o) = combination_order(Complex64::new(0.0, 0.0), &[(one, &sheets[a]), (-one, &sheets[b])], rho) {
                        total += 2.0 * rep * rep * o;
                    }
                }
            }
        }
        round_order(total, "ord J_k", p)
    }
}

/// Zeros of `J_k` inside the model disk. When other coordinates have more
/// sheets, distinct sheets of the covering share the same `k`-th coordinate,
/// the product defining `J_k` contains vanishing factors and `J_k ≡ 0`;
/// `divisor` then describes the product over the nonvanishing factors only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JkDivisor {
    pub coordinate: usize,
    pub identically_zero: bool,
    pub divisor: ValueDivisor,
}

/// Zero divisor of `J_k`; its support lies in the critical set.
pub fn jk_divisor(model: &CoveringModel, k: usize) -> Result<JkDivisor> {
    let mut points = Vec::new();
    for p in model.critical_points_inside() {
        let o = model.jk_order(k, p)?;
        if o > 0 {
            points.push((p, o));
        }
    }
    let identically_zero = model.sheet_count() > model.curve().components()[k].degree();
    Ok(JkDivisor {
        coordinate: k,
        identically_zero,
        divisor: ValueDivisor { target: format!("J_{}", k + 1), disk_radius: model.disk_radius(), points },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstiEntry {
    pub point: Complex64,
    pub coordinate: usize,
    pub branch_order: usize,
    /// Order of the nonvanishing part of `J_k`.
    pub jk_order: usize,
    /// `J_k ≡ 0`, so the inequality holds without information.
    pub vacuous: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstiReport {
    pub entries: Vec<EstiEntry>,
    pub holds: bool,
}

/// Compares the branch divisor with each `J_k` divisor at every branch record.
pub fn check_esti(model: &CoveringModel, jk: &[JkDivisor]) -> EstiReport {
    let mut entries = Vec::new();
    for j in jk {
        for b in model.branch_records() {
            let tol = 1e-8 * b.point.norm().max(1.0);
            let jk_order = j.divisor.order_at(b.point, tol);
            entries.push(EstiEntry {
                point: b.point,
                coordinate: j.coordinate,
                branch_order: b.order,
                jk_order,
                vacuous: j.identically_zero,
                holds: j.identically_zero || b.order <= jk_order,
            });
        }
    }
    let holds = entries.iter().all(|e| e.holds);
    EstiReport { entries, holds }
}

/// `J_k` for every coordinate followed by the pointwise comparison.
pub fn esti_report(model: &CoveringModel) -> Result<(Vec<JkDivisor>, EstiReport)> {
    let jk = (0..model.curve().dimension()).map(|k| jk_divisor(model, k)).collect::<Result<Vec<_>>>()?;
    let report = check_esti(model, &jk);
    Ok((jk, report))
}

/// `c·W` for an exact defining polynomial of `W`.
fn scaled_component(p: &DefiningPolynomial, c: Complex64) -> Result<DefiningPolynomial> {
    let inv = exact_value(c)?.inv().ok_or_else(|| Error::invalid("zero scale"))?;
    let coeffs: Vec<RationalFunction> =
        p.exact_coeffs()?.iter().enumerate().map(|(j, f)| f.scale(&inv.pow(j as u32))).collect();
    DefiningPolynomial::from_rational(coeffs)
}

/// Pullback of a general hyperplane `a_0 + Σ a_i W_i = 0`, with multiplicities
/// read from local expansions of every sheet.
pub fn hyperplane_divisor(model: &CoveringModel, target: &HyperplaneTarget) -> Result<ValueDivisor> {
    let curve = model.curve();
    let a = target.coefficients();
    if a.len() != curve.dimension() + 1 {
        return Err(Error::invalid(format!(
            "target has {} coefficients, the curve needs {}",
            a.len(),
            curve.dimension() + 1
        )));
    }
    if curve.dimension() == 1 {
        return value_divisor(curve, target, model.disk_radius(), model.settings());
    }
    if curve.backend() != Backend::Exact {
        return Err(Error::BackendUnsupported("hyperplane divisor in dimension > 1"));
    }
    let radius = model.disk_radius();
    let mut candidates: Vec<Complex64> = model.critical_points_inside();
    let involved: Vec<usize> = (1..a.len()).filter(|&i| a[i].norm() > 0.0).collect();
    if !involved.is_empty() {
        let mut acc = scaled_component(&curve.components()[involved[0] - 1], a[involved[0]])?;
        for &i in &involved[1..] {
            acc = alg_op(&acc, &scaled_component(&curve.components()[i - 1], a[i])?, AlgOp::Sum)?;
        }
        let poly = acc.bivariate()?.eval_w(&exact_value(-a[0])?);
        if poly.is_zero() {
            return Err(Error::TargetDegenerate);
        }
        candidates.extend(exact_roots(&poly, model.settings().start_angle)?.into_iter().map(|r| r.0).filter(|z| z.norm() < radius));
    } else if a[0].norm() == 0.0 {
        return Err(Error::invalid("hyperplane with all coefficients zero"));
    }
    candidates.sort_by(|x, y| snapped_cmp(*x, *y, 1.0));
    crate::roots::dedup_points(&mut candidates, model.settings().cluster.max(1e-9));

    let degrees: Vec<usize> = curve.components().iter().map(DefiningPolynomial::degree).collect();
    let sheets = product_sheets(&degrees);
    let mut points = Vec::new();
    for p in candidates {
        let (local, rho) = model.local_data(p, true)?;
        let local: Vec<Vec<LocalSheet>> = local.into_iter().map(|s| s.expect("all components")).collect();
        let mut total = 0.0;
        for t in &sheets {
            let pole = t.iter().enumerate().map(|(i, &j)| local[i][j].pole_order()).fold(0.0, f64::max);
            let terms: Vec<(Complex64, &LocalSheet)> = t.iter().enumerate().map(|(i, &j)| (a[i + 1], &local[i][j])).collect();
            match combination_order(a[0], &terms, rho) {
                Some(o) => total += o + pole,
                None => return Err(Error::TargetDegenerate),
            }
        }
        let o = round_order(total, "hyperplane multiplicity", p)?;
        if o > 0 {
            points.push((p, o));
        }
    }
    Ok(ValueDivisor { target: target.label().to_string(), disk_radius: radius, points })
}
