use std::fmt::Write as _;
use std::path::Path;

use algebroid::continuation::{monodromy as monodromy_loop, puiseux_expand, solve_fiber, track as track_path, PathSpec};
use algebroid::covering::{build_covering, esti_report};
use algebroid::curvature::{
    comparison_check, h_factors, jacobi_profile, k_factors, log_k_bound_check, KappaProfile, VolumeProfile,
};
use algebroid::defining::{critical_data, discriminant};
use algebroid::field::{format_complex, parse_complex, Backend};
use algebroid::nevanlinna::{fmt17, log_grid, nevanlinna_report, HyperplaneTarget};
use algebroid::problem::{ProblemFile, RadiusGrid};
use algebroid::smt::{defects, smt_margin, SmtConfig};
use algebroid::{Complex64, Error};
use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::json;

use crate::run::{Output, Run};
use crate::Common;

const DEFAULT_STEPS: usize = 40;

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn point(text: &str) -> Result<Complex64> {
    parse_complex(text).with_context(|| format!("cannot read the point `{text}`"))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TargetsFile {
    List(Vec<String>),
    Object { targets: Vec<String> },
}

/// Reads the problem file and applies the command-line overrides.
fn load(run: &mut Run, c: &Common) -> Result<ProblemFile> {
    let path = c.problem.as_deref().context("--problem is required")?;
    let text = run.read_input(path)?;
    let mut p = ProblemFile::parse(&text).with_context(|| format!("in {}", path.display()))?;
    if c.rmin.is_some() || c.rmax.is_some() || c.steps.is_some() {
        let old = p.r_grid;
        let rmin = c.rmin.or(old.map(|g| g.rmin)).context("--rmin is required when the problem has no r_grid")?;
        let rmax = c.rmax.or(old.map(|g| g.rmax)).context("--rmax is required when the problem has no r_grid")?;
        let steps = c.steps.or(old.map(|g| g.steps)).unwrap_or(DEFAULT_STEPS);
        p.r_grid = Some(RadiusGrid { rmin, rmax, steps });
    }
    if let Some(d) = c.delta {
        p.delta = d;
    }
    if let Some(s) = c.seed {
        p.seed = s;
    }
    if let Some(t) = &c.targets {
        let text = run.read_input(t)?;
        let file: TargetsFile =
            serde_json::from_str(&text).map_err(parse_error).with_context(|| format!("in {}", t.display()))?;
        p.targets = match file {
            TargetsFile::List(v) | TargetsFile::Object { targets: v } => v,
        };
    }
    p.validate()?;
    run.seed = p.seed;
    Ok(p)
}

fn targets_of(p: &ProblemFile) -> Result<Vec<HyperplaneTarget>> {
    let t = p.targets()?;
    if t.is_empty() {
        bail!("no targets: give them in the problem file or with --targets");
    }
    Ok(t)
}

fn finish(run: Run, c: &Common, out: Output) -> Result<bool> {
    let passed = out.passed.unwrap_or(true);
    run.finish(&out, c.out_dir.as_deref(), c.format)?;
    Ok(passed)
}

/// Rounds to 12 significant digits and drops parts below `1e-12` of the modulus, for summaries.
fn short(z: Complex64) -> String {
    let scale = z.norm();
    let clean = |x: f64| {
        if x.abs() <= 1e-12 * scale {
            0.0
        } else {
            format!("{x:.11e}").parse().unwrap_or(x)
        }
    };
    format_complex(Complex64::new(clean(z.re), clean(z.im)))
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn define(c: &Common) -> Result<bool> {
    let mut run = Run::new("define");
    let p = load(&mut run, c)?;
    let curve = p.curve()?;
    let crit = critical_data(&curve, p.disk_radius, &p.settings())?;
    let mut components = Vec::new();
    for (k, comp) in curve.components().iter().enumerate() {
        let disc = match comp.backend() {
            Backend::Exact if comp.degree() >= 2 => Some(discriminant(comp)?.to_string()),
            _ => None,
        };
        components.push(json!({
            "coordinate": k + 1,
            "variable": curve.vars()[k],
            "degree": comp.degree(),
            "polynomial": comp.display_with(&curve.vars()[k]),
            "discriminant": disc,
        }));
    }
    let mut table = String::from("kind,coordinate,re,im\n");
    for (k, cc) in crit.per_component.iter().enumerate() {
        for (kind, pts) in [("multiple", &cc.multiple_points), ("pole", &cc.leading_coeff_zeros)] {
            for z in pts {
                let _ = writeln!(table, "{kind},{},{},{}", k + 1, fmt17(z.re), fmt17(z.im));
            }
        }
    }
    let mut out = Output::new(json!({
        "backend": curve.backend(),
        "sheet_count": curve.sheet_count(),
        "components": components,
        "disk_radius": p.disk_radius,
        "critical_points": crit.critical_points.iter().copied().map(pair).collect::<Vec<_>>(),
    }))
    .table(table)
    .line(format!("{} sheets, {} critical points in |z| < {}", curve.sheet_count(), crit.critical_points.len(), p.disk_radius));
    for comp in &components {
        out = out.line(format!("{}: {}", comp["variable"].as_str().unwrap_or(""), comp["polynomial"].as_str().unwrap_or("")));
    }
    finish(run, c, out)
}

pub fn fiber(c: &Common, at: &str) -> Result<bool> {
    let mut run = Run::new("fiber");
    let p = load(&mut run, c)?;
    let z = point(at)?;
    let fiber = solve_fiber(&p.curve()?, z, &p.settings())?;
    let mut table = String::from("sheet,coordinate,re,im\n");
    let mut out_lines = Vec::new();
    for (j, tuple) in fiber.values.iter().enumerate() {
        for (k, w) in tuple.iter().enumerate() {
            let _ = writeln!(table, "{},{},{},{}", j + 1, k + 1, fmt17(w.re), fmt17(w.im));
        }
        let shown: Vec<String> = tuple.iter().map(|w| short(*w)).collect();
        out_lines.push(format!("sheet {}: {}", j + 1, shown.join(", ")));
    }
    let sheets: Vec<_> = fiber
        .values
        .iter()
        .enumerate()
        .map(|(j, t)| json!({"sheet": j + 1, "values": t.iter().copied().map(pair).collect::<Vec<_>>()}))
        .collect();
    let mut out = Output::new(json!({"base_point": pair(z), "sheets": sheets})).table(table);
    for l in out_lines {
        out = out.line(l);
    }
    finish(run, c, out)
}

pub fn track(c: &Common, path: &Path, from: Option<&str>) -> Result<bool> {
    let mut run = Run::new("track");
    let p = load(&mut run, c)?;
    let text = run.read_input(path)?;
    let start = from.map(point).transpose()?;
    let spec = PathSpec::from_json(&text, start)?;
    let curve = p.curve()?;
    let settings = p.settings();
    let fiber = solve_fiber(&curve, spec.start, &settings)?;
    let res = track_path(&curve, &spec, &fiber, &settings)?;
    let mut table = String::from("sheet,coordinate,start_re,start_im,end_sheet,end_re,end_im\n");
    let mut rows = Vec::new();
    for (j, tuple) in fiber.values.iter().enumerate() {
        let e = res.sheet_map[j];
        for (k, w) in tuple.iter().enumerate() {
            let v = res.end.values[e][k];
            let _ = writeln!(
                table,
                "{},{},{},{},{},{},{}",
                j + 1,
                k + 1,
                fmt17(w.re),
                fmt17(w.im),
                e + 1,
                fmt17(v.re),
                fmt17(v.im)
            );
        }
        rows.push(json!({
            "sheet": j + 1,
            "start": tuple.iter().copied().map(pair).collect::<Vec<_>>(),
            "end_sheet": e + 1,
            "end": res.end.values[e].iter().copied().map(pair).collect::<Vec<_>>(),
        }));
    }
    let map: Vec<String> = res.sheet_map.iter().enumerate().map(|(j, e)| format!("{}->{}", j + 1, e + 1)).collect();
    let out = Output::new(json!({
        "start": pair(spec.start),
        "end": pair(spec.end()),
        "steps": res.steps,
        "sheets": rows,
    }))
    .table(table)
    .line(format!("tracked {} sheets in {} steps: {}", fiber.sheet_count(), res.steps, map.join(" ")));
    finish(run, c, out)
}

fn cycle_type_string(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn monodromy(c: &Common, around: &str, radius: f64) -> Result<bool> {
    let mut run = Run::new("monodromy");
    let p = load(&mut run, c)?;
    let center = point(around)?;
    let m = monodromy_loop(&p.curve()?, center, radius, None, &p.settings())?;
    let mut table = String::from("sheet,image\n");
    for (j, i) in m.permutation.0.iter().enumerate() {
        let _ = writeln!(table, "{},{}", j + 1, i + 1);
    }
    let cycle_type = m.permutation.cycle_type();
    let out = Output::new(json!({
        "around": pair(center),
        "radius": radius,
        "loop_radius": m.loop_radius,
        "base_point": pair(m.base_point),
        "permutation": m.permutation.0.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "cycles": m.permutation.to_string(),
        "cycle_type": cycle_type,
    }))
    .table(table)
    .line(format!("permutation {}", m.permutation))
    .line(format!("cycle type {}", cycle_type_string(&cycle_type)));
    finish(run, c, out)
}

pub fn puiseux(c: &Common, at: &str, terms: usize) -> Result<bool> {
    let mut run = Run::new("puiseux");
    let p = load(&mut run, c)?;
    let z0 = point(at)?;
    let series = puiseux_expand(&p.curve()?, z0, terms, &p.settings())?;
    let mut table = String::from("cycle,coordinate,ramification,index,exponent,re,im\n");
    let mut out_series = Vec::new();
    let mut lines = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let lam = s.ramification as f64;
        for t in &s.terms {
            let _ = writeln!(
                table,
                "{},{},{},{},{},{},{}",
                i + 1,
                s.coordinate + 1,
                s.ramification,
                t.index,
                fmt17(t.index as f64 / lam),
                fmt17(t.coefficient.re),
                fmt17(t.coefficient.im)
            );
        }
        let shown: Vec<String> = s
            .terms
            .iter()
            .map(|t| format!("({})·t^{}", short(t.coefficient), t.index))
            .collect();
        lines.push(format!("cycle {} (coordinate {}, λ = {}): {}", i + 1, s.coordinate + 1, s.ramification, shown.join(" + ")));
        out_series.push(json!({
            "cycle": i + 1,
            "coordinate": s.coordinate + 1,
            "sheets": s.sheets.iter().map(|j| j + 1).collect::<Vec<_>>(),
            "ramification": s.ramification,
            "leading_index": s.leading_index,
            "terms": s.terms.iter().map(|t| json!({"index": t.index, "coefficient": pair(t.coefficient)})).collect::<Vec<_>>(),
            "radius": s.radius,
            "fit_residual": s.fit_residual,
        }));
    }
    let mut out = Output::new(json!({"point": pair(z0), "variable": "t = (z - p)^(1/λ)", "series": out_series})).table(table);
    for l in lines {
        out = out.line(l);
    }
    finish(run, c, out)
}

pub fn branch(c: &Common) -> Result<bool> {
    let mut run = Run::new("branch");
    let p = load(&mut run, c)?;
    let model = build_covering(&p.curve()?, p.disk_radius, &p.settings())?;
    let report = model.report();
    let (jk, esti) = esti_report(&model)?;
    let mut table = String::from("re,im,order,cycle_type\n");
    for b in &report.branch_records {
        let lens: Vec<String> = b.cycle_lengths.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(table, "{},{},{},{}", fmt17(b.point.re), fmt17(b.point.im), b.order, lens.join(" "));
    }
    let generators: Vec<_> = report
        .generators
        .iter()
        .map(|g| {
            json!({
                "point": pair(g.point),
                "permutation": g.permutation.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "cycle_type": g.cycle_type,
            })
        })
        .collect();
    let jk_json: Vec<_> = jk
        .iter()
        .map(|j| {
            json!({
                "coordinate": j.coordinate + 1,
                "identically_zero": j.identically_zero,
                "points": j.divisor.points.iter().map(|(z, m)| json!({"point": pair(*z), "order": m})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let esti_json: Vec<_> = esti
        .entries
        .iter()
        .map(|e| {
            json!({
                "point": pair(e.point),
                "coordinate": e.coordinate + 1,
                "branch_order": e.branch_order,
                "jk_order": e.jk_order,
                "vacuous": e.vacuous,
                "holds": e.holds,
            })
        })
        .collect();
    let degree: usize = report.branch_records.iter().map(|b| b.order).sum();
    let out = Output::new(json!({
        "sheet_count": report.sheet_count,
        "disk_radius": report.disk_radius,
        "base_point": pair(report.base_point),
        "critical_points": report.critical_points.iter().copied().map(pair).collect::<Vec<_>>(),
        "branch_points": report.branch_records.iter().map(|b| json!({
            "point": pair(b.point),
            "cycle_lengths": b.cycle_lengths,
            "order": b.order,
        })).collect::<Vec<_>>(),
        "branch_divisor_degree": degree,
        "generators": generators,
        "boundary_cycle_type": report.boundary_cycle_type,
        "jk": jk_json,
        "comparison": esti_json,
        "comparison_holds": esti.holds,
    }))
    .table(table)
    .line(format!("{} branch points, branch divisor degree {degree}", report.branch_records.len()))
    .line(format!("boundary cycle type {}", cycle_type_string(&report.boundary_cycle_type)))
    .line(format!("branch divisor ≤ (J_k = 0): {}", if esti.holds { "holds" } else { "VIOLATED" }))
    .check(esti.holds);
    finish(run, c, out)
}

pub fn nevanlinna(c: &Common) -> Result<bool> {
    let mut run = Run::new("nevanlinna");
    let p = load(&mut run, c)?;
    let targets = targets_of(&p)?;
    let model = build_covering(&p.centered_curve()?, p.disk_radius, &p.settings())?;
    let report = nevanlinna_report(&model, &targets, &p.radii()?)?;
    let mut out = Output::new(&report).table(report.to_csv());
    for f in &report.fmt {
        out = out.line(format!("{}: FMT residual max deviation {:.3e}", f.target, f.max_deviation));
    }
    out.warnings = report.warnings.clone();
    finish(run, c, out)
}

pub fn fmt(c: &Common, target: Option<&str>) -> Result<bool> {
    let mut run = Run::new("fmt");
    let p = load(&mut run, c)?;
    let n = p.curve.components.len();
    let target = match target {
        Some(t) => HyperplaneTarget::parse(t, n)?,
        None => targets_of(&p)?.remove(0),
    };
    let tol = c.tol.unwrap_or(0.05);
    let model = build_covering(&p.centered_curve()?, p.disk_radius, &p.settings())?;
    let report = nevanlinna_report(&model, std::slice::from_ref(&target), &p.radii()?)?;
    let f = &report.fmt[0];
    let mut table = String::from("r,T,m,N,residual\n");
    for k in 0..report.r.len() {
        let row = [report.r[k], report.t[k], report.m[0][k], report.n[0][k], f.residual[k]].map(fmt17);
        let _ = writeln!(table, "{}", row.join(","));
    }
    let passed = f.max_deviation < tol;
    let mut out = Output::new(json!({
        "target": f.target,
        "r": f.r,
        "residual": f.residual,
        "median": f.median,
        "max_deviation": f.max_deviation,
        "tolerance": tol,
        "passed": passed,
    }))
    .table(table)
    .line(format!("{}: max deviation {:.3e} from median {:.6} (tolerance {tol})", f.target, f.max_deviation, f.median))
    .check(passed);
    out.warnings = report.warnings.clone();
    finish(run, c, out)
}

pub fn smt(c: &Common) -> Result<bool> {
    let mut run = Run::new("smt");
    let p = load(&mut run, c)?;
    let targets = targets_of(&p)?;
    let radii = p.radii()?;
    let model = build_covering(&p.centered_curve()?, p.disk_radius, &p.settings())?;
    let config = SmtConfig {
        targets: targets.clone(),
        delta: p.delta,
        r_grid: radii.clone(),
        epsilon_margin: c.tol.unwrap_or(p.tolerances.epsilon_margin),
    };
    let report = smt_margin(&model, &config)?;
    let mut warnings = Vec::new();
    let defect_json = match defects(&model, &targets, &radii) {
        Ok(d) => json!(d),
        Err(e) => {
            warnings.push(format!("defects not computed: {}: {e}", e.name()));
            serde_json::Value::Null
        }
    };
    let mut out = Output::new(json!({
        "sheet_count": report.sheet_count,
        "dimension": report.dimension,
        "q": report.q,
        "coefficient": report.coefficient,
        "delta": report.delta,
        "targets": report.targets,
        "general_position": true,
        "top_decile_min": report.top_decile_min,
        "c1": report.c1,
        "c2": report.c2,
        "fit_excess": report.fit_excess,
        "epsilon_margin": report.epsilon_margin,
        "passed": report.passed,
        "defects": defect_json,
    }))
    .table(report.to_csv())
    .line(format!(
        "q = {}, coefficient {}, min normalized slack on the top decile {:.6} (margin -{})",
        report.q, report.coefficient, report.top_decile_min, report.epsilon_margin
    ))
    .line(format!("fitted C1 = {:.6e}, C2 = {:.6e}", report.c1, report.c2))
    .line(if report.passed { "slack check passed" } else { "slack check FAILED" })
    .check(report.passed);
    out.both = true;
    out.warnings = warnings;
    finish(run, c, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CurvatureOp {
    Jacobi,
    Kfactor,
    Hfactor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    kappa: Option<KappaProfile>,
    volume: Option<VolumeProfile>,
    /// Exponent `m` of the K factor.
    #[serde(default = "one")]
    m: u32,
}

fn one() -> u32 {
    1
}

pub fn curvature(c: &Common, op: CurvatureOp, profile: &Path) -> Result<bool> {
    let mut run = Run::new("curvature");
    let text = run.read_input(profile)?;
    let file: ProfileFile =
        serde_json::from_str(&text).map_err(parse_error).with_context(|| format!("in {}", profile.display()))?;
    run.seed = c.seed.unwrap_or(0);
    let (rmin, rmax, steps) = match op {
        CurvatureOp::Jacobi => (0.1, 20.0, 50),
        CurvatureOp::Kfactor => (1.0, 40.0, 30),
        CurvatureOp::Hfactor => (1.0, 1e3, 20),
    };
    let grid = log_grid(c.rmin.unwrap_or(rmin), c.rmax.unwrap_or(rmax), c.steps.unwrap_or(steps))?;
    let delta = c.delta.unwrap_or(0.05);
    let kappa = || file.kappa.as_ref().context("the profile file needs a `kappa` entry");
    let out = match op {
        CurvatureOp::Jacobi => {
            let kappa = kappa()?;
            let tol = c.tol.unwrap_or(1e-6);
            let g = jacobi_profile(kappa, &grid)?;
            let cmp = comparison_check(kappa, &grid, tol)?;
            let mut table = String::from("t,G,dG,lower,upper\n");
            for k in 0..grid.len() {
                let row = [grid[k], g[k].0, g[k].1, cmp.lower[k], cmp.upper[k]].map(fmt17);
                let _ = writeln!(table, "{}", row.join(","));
            }
            Output::new(&cmp)
                .table(table)
                .line(format!(
                    "t ≤ G(t) ≤ χ(√-κ(t), t): {} (largest violation {:.3e}, tolerance {tol})",
                    if cmp.holds { "holds" } else { "VIOLATED" },
                    cmp.max_violation
                ))
                .check(cmp.holds)
        }
        CurvatureOp::Kfactor => {
            let kappa = kappa()?;
            let k = k_factors(&grid, delta, kappa, file.m)?;
            let bound = log_k_bound_check(&grid, delta, kappa, file.m)?;
            let mut table = String::from("r,K,log_plus_K,shape\n");
            for i in 0..grid.len() {
                let row = [grid[i], k[i], bound.log_plus_k[i], bound.shape[i]].map(fmt17);
                let _ = writeln!(table, "{}", row.join(","));
            }
            Output::new(json!({"m": file.m, "delta": delta, "k": k, "bound": bound}))
                .table(table)
                .line(format!(
                    "log⁺K = O(shape): slope {:.6} then {:.6}: {}",
                    bound.c,
                    bound.tail_slope,
                    if bound.holds { "holds" } else { "VIOLATED" }
                ))
                .check(bound.holds)
        }
        CurvatureOp::Hfactor => {
            let volume = file.volume.as_ref().context("the profile file needs a `volume` entry")?;
            let hs = grid.iter().map(|&r| h_factors(volume, r, delta)).collect::<Result<Vec<_>, _>>()?;
            let mut table = String::from("r,H,H_delta\n");
            for (r, (h, hd)) in grid.iter().zip(&hs) {
                let _ = writeln!(table, "{},{},{}", fmt17(*r), fmt17(*h), fmt17(*hd));
            }
            Output::new(json!({
                "delta": delta,
                "r": grid,
                "h": hs.iter().map(|x| x.0).collect::<Vec<_>>(),
                "h_delta": hs.iter().map(|x| x.1).collect::<Vec<_>>(),
            }))
            .table(table)
            .line(format!("H factors at {} radii", grid.len()))
        }
    };
    finish(run, c, out)
}
