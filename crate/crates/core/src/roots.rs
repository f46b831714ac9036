//! Roots of univariate polynomials with floating-point coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Poly;

const MAX_ITER: usize = 500;

/// `(p(x), p'(x))` by Horner. Coefficients lowest degree first.
pub fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All roots of `Σ c_k x^k`, with multiplicity, by the Aberth–Ehrlich
/// iteration. `start_angle` rotates the initial circle.
pub fn poly_roots(coeffs: &[Complex64], start_angle: f64) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::RootFindingFailure("zero polynomial".into()));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::RootFindingFailure("non-finite coefficient".into()));
    }
    let zeros = c.iter().take_while(|x| **x == Complex64::new(0.0, 0.0)).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let c = &c[zeros..];
    match c.len() - 1 {
        0 => {}
        1 => roots.push(-c[0] / c[1]),
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let sq = (b * b - 4.0 * a * cc).sqrt();
            let q = if (b.conj() * sq).re >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
            if q == Complex64::new(0.0, 0.0) {
                roots.extend([Complex64::new(0.0, 0.0); 2]);
            } else {
                roots.push(q / a);
                roots.push(cc / q);
            }
        }
        _ => roots.extend(aberth(c, start_angle)?),
    }
    Ok(roots)
}

/// Rescales `x = ρ y` so that the roots have modulus near 1, which keeps
/// the iteration away from underflow and overflow.
fn aberth(c: &[Complex64], start_angle: f64) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    // powers of two keep the rescaling exact
    let mut e = ((c[0].norm().log2() - c[n].norm().log2()) / n as f64).round();
    if !e.is_finite() {
        e = 0.0;
    }
    let scaled: Vec<Complex64> = c.iter().enumerate().map(|(k, a)| a * (e * k as f64).exp2()).collect();
    let top = scaled.iter().map(|a| a.norm()).fold(0.0, f64::max).log2().round().exp2();
    let scaled: Vec<Complex64> = scaled.iter().map(|a| a / top).collect();
    Ok(aberth_unit(&scaled, start_angle)?.into_iter().map(|y| y * e.exp2()).collect())
}

fn aberth_unit(c: &[Complex64], start_angle: f64) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let radius = (c[0] / c[n]).norm().powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, start_angle + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    let mut done = vec![false; n];
    let mut last = vec![f64::INFINITY; n];
    for _ in 0..MAX_ITER {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(c, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            let size = z[i].norm().max(f64::MIN_POSITIVE);
            // converged, or stagnating at the rounding level
            if step.norm() <= 4.0 * f64::EPSILON * size || (step.norm() <= 1e-11 * size && step.norm() >= 0.5 * last[i]) {
                done[i] = true;
            }
            last[i] = step.norm();
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    // Clustered roots converge slowly but are still accurate to the
    // conditioning of the cluster; accept if the residuals are small.
    let scale = |x: Complex64| c.iter().rev().fold(0.0, |acc, a| acc * x.norm() + a.norm());
    if z.iter().all(|&x| horner(c, x).0.norm() <= 1e-8 * scale(x)) {
        Ok(z)
    } else {
        Err(Error::RootFindingFailure(format!("Aberth iteration did not converge for degree {n}")))
    }
}

/// Distinct roots of an exact polynomial with multiplicities, via the
/// square-free decomposition.
pub fn exact_roots(p: &Poly, start_angle: f64) -> Result<Vec<(Complex64, usize)>> {
    let mut out = Vec::new();
    for (factor, k) in p.square_free_decomposition() {
        for r in poly_roots(&factor.to_complex_coeffs(), start_angle)? {
            out.push((r, k));
        }
    }
    Ok(out)
}

/// Lexicographic order on (re, im) after snapping both to a grid of
/// `1e-9 * scale`, so rounding noise does not reorder nearly equal values.
pub fn snapped_cmp(a: Complex64, b: Complex64, scale: f64) -> std::cmp::Ordering {
    let q = 1e-9 * scale.max(1.0);
    // `+ 0.0` folds -0.0 into 0.0, which total_cmp would otherwise order first.
    let snap = |x: f64| (x / q).round() + 0.0;
    snap(a.re).total_cmp(&snap(b.re)).then(snap(a.im).total_cmp(&snap(b.im)))
}

/// Merges points closer than `tol * max(1, |z|)`, keeping the first representative.
pub fn dedup_points(points: &mut Vec<Complex64>, tol: f64) {
    let mut kept: Vec<Complex64> = Vec::with_capacity(points.len());
    for &p in points.iter() {
        if !kept.iter().any(|q| (p - q).norm() <= tol * p.norm().max(1.0)) {
            kept.push(p);
        }
    }
    *points = kept;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_unity() {
        let mut coeffs = vec![c(0.0, 0.0); 8];
        coeffs[0] = c(-1.0, 0.0);
        coeffs[7] = c(1.0, 0.0);
        let roots = poly_roots(&coeffs, 0.3).unwrap();
        assert_eq!(roots.len(), 7);
        for r in roots {
            assert!((r.powi(7) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn quadratic_is_stable_for_disparate_roots() {
        // (x - 1e8)(x - 1e-8)
        let roots = poly_roots(&[c(1.0, 0.0), c(-1e8 - 1e-8, 0.0), c(1.0, 0.0)], 0.0).unwrap();
        let small = roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min);
        assert!((small - 1e-8).abs() < 1e-22);
    }

    #[test]
    fn zero_roots_are_split_off() {
        let roots = poly_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)], 0.0).unwrap();
        assert_eq!(roots.iter().filter(|r| r.norm() == 0.0).count(), 2);
        assert!(roots.iter().any(|r| (r - 2.0).norm() < 1e-15));
    }

    #[test]
    fn exact_roots_report_multiplicity() {
        let p = &Poly::from_ints(&[-1, 1]).pow(3) * &Poly::from_ints(&[2, 1]);
        let mut roots = exact_roots(&p, 0.1).unwrap();
        roots.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 + 2.0).norm() < 1e-14 && roots[0].1 == 1);
        assert!((roots[1].0 - 1.0).norm() < 1e-14 && roots[1].1 == 3);
    }
}
