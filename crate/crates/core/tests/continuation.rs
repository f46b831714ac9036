use std::f64::consts::{PI, TAU};

use algebroid::continuation::{
    branch_order, is_irreducible, lasso_system, monodromy, puiseux_expand, solve_fiber, track, PathSpec, Permutation,
};
use algebroid::defining::{AlgebroidCurve, DefiningPolynomial};
use algebroid::field::Backend;
use algebroid::{Complex64, Error, NumericSettings};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn curve(components: &[&[&str]]) -> AlgebroidCurve {
    AlgebroidCurve::new(components.iter().map(|p| DefiningPolynomial::parse(p, Backend::Exact).unwrap()).collect()).unwrap()
}

fn power(nu: usize) -> AlgebroidCurve {
    let mut coeffs = vec!["0".to_string(); nu + 1];
    coeffs[0] = "-z".into();
    coeffs[nu] = "1".into();
    AlgebroidCurve::single(DefiningPolynomial::parse(&coeffs, Backend::Exact).unwrap())
}

fn s() -> NumericSettings {
    NumericSettings::default()
}

#[test]
fn fiber_examples() {
    let f = solve_fiber(&curve(&[&["-z", "0", "1"]]), c(4.0, 0.0), &s()).unwrap();
    assert_eq!(f.values.len(), 2);
    assert!((f.values[0][0] + 2.0).norm() < 1e-14);
    assert!((f.values[1][0] - 2.0).norm() < 1e-14);

    let err = solve_fiber(&curve(&[&["-z", "0", "1"]]), c(0.0, 0.0), &s()).unwrap_err();
    assert!(matches!(err, Error::NearCritical { .. }));

    let f = solve_fiber(&curve(&[&["-z", "0", "1"], &["-z", "0", "0", "1"]]), c(1.0, 0.0), &s()).unwrap();
    assert_eq!(f.values.len(), 6);
    for t in &f.values {
        assert!((t[0].powi(2) - 1.0).norm() < 1e-13);
        assert!((t[1].powi(3) - 1.0).norm() < 1e-13);
    }
    // canonical order: lexicographic by (re, im) per coordinate
    for w in f.values.windows(2) {
        assert!(w[0][0].re <= w[1][0].re + 1e-12);
    }
}

#[test]
fn pole_at_base() {
    let err = solve_fiber(&curve(&[&["-1", "0", "z"]]), c(0.0, 0.0), &s()).unwrap_err();
    assert!(matches!(err, Error::PoleAtBase(_)));
}

#[test]
fn tracking_square_root_along_half_circle() {
    let cv = curve(&[&["-z", "0", "1"]]);
    let start = solve_fiber(&cv, c(1.0, 0.0), &s()).unwrap();
    let path = PathSpec::new(c(1.0, 0.0)).arc(c(0.0, 0.0), PI);
    let r = track(&cv, &path, &start, &s()).unwrap();
    // sheet w = 1 is index 1 in the start fiber
    let w = r.end.values[r.sheet_map[1]][0];
    assert!((w - c(0.0, 1.0)).norm() < 1e-10, "{w}");
}

#[test]
fn constant_path_is_identity() {
    let cv = curve(&[&["-z", "0", "0", "1"]]);
    let start = solve_fiber(&cv, c(2.0, 1.0), &s()).unwrap();
    let r = track(&cv, &PathSpec::new(c(2.0, 1.0)), &start, &s()).unwrap();
    assert_eq!(r.end, start);
    assert_eq!(Permutation(r.sheet_map).is_identity(), true);
}

#[test]
fn full_loop_swaps_square_roots() {
    let cv = curve(&[&["-z", "0", "1"]]);
    let start = solve_fiber(&cv, c(1.0, 0.0), &s()).unwrap();
    let r = track(&cv, &PathSpec::circle(c(0.0, 0.0), 1.0), &start, &s()).unwrap();
    assert!((r.end.values[r.sheet_map[1]][0] + 1.0).norm() < 1e-10);
}

#[test]
fn track_then_reverse_returns() {
    let cv = curve(&[&["-z", "1", "0", "1"], &["1", "-z", "1"]]);
    let path = PathSpec::new(c(3.0, 0.5)).line_to(c(-2.0, 2.5)).arc(c(0.0, 0.0), 2.0).line_to(c(0.7, -3.0));
    let start = solve_fiber(&cv, path.start, &s()).unwrap();
    let fwd = track(&cv, &path, &start, &s()).unwrap();
    assert!(fwd.end.set_distance(&solve_fiber(&cv, path.end(), &s()).unwrap()) < 1e-10);
    let back = track(&cv, &path.reversed(), &fwd.end, &s()).unwrap();
    for (j, &k) in fwd.sheet_map.iter().enumerate() {
        let home = back.sheet_map[k];
        assert_eq!(home, j);
        for (a, b) in back.end.values[home].iter().zip(&start.values[j]) {
            assert!((a - b).norm() < 1e-8);
        }
    }
}

#[test]
fn monodromy_examples() {
    let m = monodromy(&power(2), c(0.0, 0.0), 1.0, None, &s()).unwrap();
    assert_eq!(m.permutation, Permutation(vec![1, 0]));
    let shifted = curve(&[&["1-z", "0", "1"]]);
    let m = monodromy(&shifted, c(0.0, 0.0), 0.5, None, &s()).unwrap();
    assert!(m.permutation.is_identity());
    let m = monodromy(&power(3), c(0.0, 0.0), 1.0, None, &s()).unwrap();
    assert_eq!(m.permutation.cycle_type(), vec![3]);
    let err = monodromy(&shifted, c(0.0, 0.0), 2.0, None, &s()).unwrap_err();
    assert!(matches!(err, Error::LoopContainsOtherBranchPoints { .. }));
}

#[test]
fn power_curves_have_full_cycles() {
    for nu in 2..=6 {
        let m = monodromy(&power(nu), c(0.0, 0.0), 1.0, None, &s()).unwrap();
        assert_eq!(m.permutation.cycle_type(), vec![nu]);
        // counterclockwise: w ↦ w e^{2πi/ν}
        let base = solve_fiber(&power(nu), c(1.0, 0.0), &s()).unwrap();
        for (j, &k) in m.permutation.0.iter().enumerate() {
            let expect = base.values[j][0] * Complex64::from_polar(1.0, TAU / nu as f64);
            assert!((base.values[k][0] - expect).norm() < 1e-9);
        }
    }
}

#[test]
fn branch_order_examples() {
    let b = branch_order(&power(2), c(0.0, 0.0), &s()).unwrap();
    assert_eq!((b.cycles, b.cycle_lengths.clone(), b.order), (1, vec![2], 1));
    let b = branch_order(&power(3), c(0.0, 0.0), &s()).unwrap();
    assert_eq!((b.cycles, b.order), (1, 2));
    let b = branch_order(&curve(&[&["-z^2", "0", "1"]]), c(0.0, 0.0), &s()).unwrap();
    assert_eq!((b.cycles, b.cycle_lengths.clone(), b.order), (2, vec![1, 1], 0));
    let b = branch_order(&power(4), c(3.0, 1.0), &s()).unwrap();
    assert_eq!(b.cycles, 4);
}

#[test]
fn irreducibility_examples() {
    assert!(is_irreducible(&power(2), 2.0, &s()).unwrap());
    assert!(!is_irreducible(&curve(&[&["-z^2", "0", "1"]]), 2.0, &s()).unwrap());
    for nu in 2..=5 {
        assert!(is_irreducible(&power(nu), 2.0, &s()).unwrap());
    }
}

#[test]
fn lasso_product_equals_boundary() {
    for cv in [
        curve(&[&["-z", "-3", "0", "1"]]),
        curve(&[&["-z", "0", "1"], &["1-z", "0", "1"]]),
        curve(&[&["1", "z", "0", "1"]]),
        curve(&[&["-z", "0", "z^2-1"]]),
    ] {
        let sys = lasso_system(&cv, 4.0, &s()).unwrap();
        assert_eq!(sys.product(), sys.boundary, "{:?}", sys.generators);
    }
}

#[test]
fn puiseux_examples() {
    let series = puiseux_expand(&power(2), c(0.0, 0.0), 3, &s()).unwrap();
    assert_eq!(series.len(), 1);
    let p = &series[0];
    assert_eq!(p.ramification, 2);
    assert_eq!(p.leading_exponent(), (1, 2));
    let b = p.terms.iter().find(|t| t.index == 1).unwrap().coefficient;
    assert!((b.norm() - 1.0).abs() < 1e-10);

    let cusp = curve(&[&["1-z^3", "-2", "1"]]);
    let series = puiseux_expand(&cusp, c(0.0, 0.0), 3, &s()).unwrap();
    assert_eq!(series.len(), 1);
    assert_eq!(series[0].ramification, 2);
    assert_eq!(series[0].leading_exponent(), (3, 2));
    for z in [c(1e-2, 0.0), c(0.0, 1e-3)] {
        let tracked = solve_fiber(&cusp, z, &s()).unwrap();
        for v in series[0].eval_all(z) {
            let d = tracked.values.iter().map(|t| (t[0] - v).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10);
        }
    }

    let cross = puiseux_expand(&curve(&[&["-z^2", "0", "1"]]), c(0.0, 0.0), 2, &s()).unwrap();
    assert_eq!(cross.len(), 2);
    assert!(cross.iter().all(|p| p.ramification == 1 && p.leading_index == 1));
}

#[test]
fn puiseux_pole_branch() {
    // z W^2 = 1: W = ±z^{-1/2}
    let series = puiseux_expand(&curve(&[&["-1", "0", "z"]]), c(0.0, 0.0), 2, &s()).unwrap();
    assert_eq!(series.len(), 1);
    assert_eq!(series[0].ramification, 2);
    assert_eq!(series[0].leading_index, -1);
}
