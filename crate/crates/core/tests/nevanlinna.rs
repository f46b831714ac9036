use algebroid::covering::{build_covering, value_divisor};
use algebroid::defining::{AlgebroidCurve, DefiningPolynomial};
use algebroid::field::Backend;
use algebroid::nevanlinna::*;
use algebroid::{Complex64, Error, NumericSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn curve(p: &[&str]) -> AlgebroidCurve {
    AlgebroidCurve::single(DefiningPolynomial::parse(p, Backend::Exact).unwrap())
}

fn s() -> NumericSettings {
    NumericSettings::default()
}

#[test]
fn identity_curve_matches_closed_form() {
    let m = build_covering(&curve(&["-z", "1"]), 60.0, &s()).unwrap();
    let f = Functionals::new(&m);
    for r in [2.0, 10.0, 50.0] {
        let exact = 0.5 * (1.0f64 + r * r).ln();
        let a = f.characteristic(r).unwrap();
        let b = f.characteristic_direct(r).unwrap();
        assert!((a - exact).abs() < 1e-8 * exact, "r={r} {a} vs {exact}");
        assert!((b - exact).abs() < 1e-2 * exact, "r={r} {b} vs {exact}");
    }
}

#[test]
fn constant_curve_has_zero_characteristic() {
    let m = build_covering(&curve(&["-3", "1"]), 20.0, &s()).unwrap();
    let t = Functionals::new(&m).characteristic_grid(&[1.0, 5.0, 19.0]).unwrap();
    assert!(t.iter().all(|&x| x.abs() < 1e-12), "{t:?}");
}

#[test]
fn square_root_closed_form() {
    let m = build_covering(&curve(&["-z", "0", "1"]), 200.0, &s()).unwrap();
    let grid = log_grid(1.0, 150.0, 6).unwrap();
    let t = Functionals::new(&m).characteristic_grid(&grid).unwrap();
    for (r, v) in grid.iter().zip(&t) {
        let exact = 0.5 * (1.0 + r).ln();
        assert!((v - exact).abs() < 1e-7, "r={r} {v} vs {exact}");
    }
}

#[test]
fn characteristic_is_increasing() {
    let m = build_covering(&curve(&["1-z", "0", "0", "1"]), 100.0, &s()).unwrap();
    let grid = log_grid(0.5, 90.0, 12).unwrap();
    let t = Functionals::new(&m).characteristic_grid(&grid).unwrap();
    assert!(t.windows(2).all(|w| w[1] > w[0]), "{t:?}");
}

#[test]
fn proximity_examples() {
    let m = build_covering(&curve(&["-z", "1"]), 20.0, &s()).unwrap();
    // W = z, target ∞: the spherical potential is ½log(1+|z|²) on the whole circle
    for r in [0.5, 2.0, 10.0] {
        let v = proximity(&m, &HyperplaneTarget::infinity(1), r).unwrap();
        let exact = 0.5 * (1.0f64 + r * r).ln();
        assert!((v - exact).abs() < 1e-8, "r={r} {v} vs {exact}");
    }
    // the circle |z| = 1 passes through the target 1
    let p = Functionals::new(&m).proximity(&HyperplaneTarget::value(c(1.0, 0.0)), 1.0).unwrap();
    assert!(p.perturbed && p.radius > 1.0);
}

#[test]
fn potential_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let targets = [
        HyperplaneTarget::value(c(0.3, -2.0)),
        HyperplaneTarget::infinity(2),
        HyperplaneTarget::new(vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.5)]).unwrap(),
    ];
    for _ in 0..1000 {
        for t in &targets {
            let zeta: Vec<Complex64> = (0..=t.dimension())
                .map(|_| c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)) * 10f64.powf(rng.gen_range(-3.0..3.0)))
                .collect();
            assert!(t.potential(&zeta) >= -1e-12);
        }
    }
}

#[test]
fn counting_examples() {
    let cv = curve(&["1-z", "0", "1"]);
    let d = value_divisor(&cv, &HyperplaneTarget::value(c(0.0, 0.0)), 3.0, &s()).unwrap();
    let e = std::f64::consts::E;
    assert!((counting(&d, 2, e, false).unwrap() - 0.5).abs() < 1e-12);
    assert!((counting(&d, 2, e, true).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(counting(&d, 2, 0.9, false).unwrap(), 0.0);

    let d = value_divisor(&curve(&["-z", "1"]), &HyperplaneTarget::value(c(0.0, 0.0)), 3.0, &s()).unwrap();
    assert!(matches!(counting(&d, 1, 2.0, false), Err(Error::DivisorPointAtOrigin)));
}

#[test]
fn branch_counting_examples() {
    let m = build_covering(&curve(&["1-z", "0", "1"]), 10.0, &s()).unwrap();
    for r in [2.0, 7.0] {
        assert!((branch_counting(&m, r).unwrap() - 0.5 * f64::ln(r)).abs() < 1e-12);
    }
    let m = build_covering(&curve(&["1-z", "0", "0", "1"]), 10.0, &s()).unwrap();
    assert!((branch_counting(&m, 5.0).unwrap() - 2.0 / 3.0 * f64::ln(5.0)).abs() < 1e-12);
    assert_eq!(branch_counting(&m, 0.5).unwrap(), 0.0);
}

#[test]
fn first_main_theorem_identity_curve() {
    let m = build_covering(&curve(&["-z", "1"]), 110.0, &s()).unwrap();
    let grid = log_grid(2.0, 100.0, 10).unwrap();
    let check = fmt_check(&m, &HyperplaneTarget::value(c(1.0, 0.0)), &grid).unwrap();
    assert!(check.max_deviation < 0.02, "{check:?}");
}

#[test]
fn first_main_theorem_square_root() {
    let m = build_covering(&curve(&["1-z", "0", "1"]), 60.0, &s()).unwrap();
    let grid = log_grid(2.0, 50.0, 8).unwrap();
    let targets = [HyperplaneTarget::value(c(0.0, 0.0)), HyperplaneTarget::value(c(2.0, 1.0)), HyperplaneTarget::infinity(1)];
    let report = nevanlinna_report(&m, &targets, &grid).unwrap();
    for f in &report.fmt {
        assert!(f.max_deviation < 1e-6, "{f:?}");
    }
    let csv = report.to_csv();
    assert!(csv.starts_with("r,T,m_target_1,m_target_2,m_target_3,N_target_1"));
    assert_eq!(csv.lines().count(), grid.len() + 1);
}

#[test]
fn branching_bound() {
    let m = build_covering(&curve(&["1-z^3", "0", "1"]), 60.0, &s()).unwrap();
    let grid = log_grid(2.0, 50.0, 10).unwrap();
    let b = bran_bound_check(&m, &grid, 2).unwrap();
    assert!(b.max_increase < 1e-6, "{b:?}");
}

#[test]
fn harmonic_measure() {
    let g = GreenKernel::new(3.0);
    let mean = g.boundary_average(|z| z.re + (z * z).im, 256);
    assert!(mean.abs() < 1e-10);
    assert!((g.boundary_average(|_| 1.0, 17) - 1.0).abs() < 1e-14);
    assert_eq!(g.value(c(4.0, 0.0)), 0.0);
    assert!((g.value(c(1.0, 0.0)) - 3f64.ln() / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn target_parsing() {
    let t = HyperplaneTarget::parse("value:2", 1).unwrap();
    assert_eq!(t.as_point(), Some(PointTarget::Finite(c(2.0, 0.0))));
    assert_eq!(HyperplaneTarget::parse("-1", 1).unwrap().as_point(), Some(PointTarget::Finite(c(-1.0, 0.0))));
    assert_eq!(HyperplaneTarget::parse("inf", 1).unwrap().as_point(), Some(PointTarget::Infinity));
    let h = HyperplaneTarget::parse("hyperplane:1,0,2", 2).unwrap();
    assert_eq!(h.dimension(), 2);
    let norm: f64 = h.coefficients().iter().map(|a| a.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-15);
    assert!(HyperplaneTarget::parse("hyperplane:1,2", 2).is_err());
    assert!(HyperplaneTarget::parse("value:z", 1).is_err());
    assert!(HyperplaneTarget::parse("3", 2).is_err());
}
