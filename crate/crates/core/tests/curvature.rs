use algebroid::curvature::*;
use algebroid::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn jacobi_closed_forms() {
    let t = grid(0.1, 20.0, 50);
    let cases: [(f64, fn(f64) -> f64); 3] = [(0.0, |t| t), (-1.0, f64::sinh), (-4.0, |t| (2.0 * t).sinh() / 2.0)];
    for (k, exact) in cases {
        let g = jacobi_profile(&KappaProfile::constant(k).unwrap(), &t).unwrap();
        for (ti, (gi, _)) in t.iter().zip(g) {
            assert!(rel(gi, exact(*ti)) < 1e-8, "κ={k} t={ti} {gi}");
        }
    }
    assert_eq!(jacobi_g(&KappaProfile::constant(-1.0).unwrap(), 0.0).unwrap(), 0.0);
}

#[test]
fn comparison_on_model_profiles() {
    let t = grid(0.0, 20.0, 50);
    for p in [KappaProfile::constant(0.0).unwrap(), KappaProfile::constant(-1.0).unwrap(), KappaProfile::expression("-t").unwrap()] {
        let r = comparison_check(&p, &t, 1e-6).unwrap();
        assert!(r.holds, "{r:?}");
    }
    // κ = -t: both bounds strict away from 0
    let r = comparison_check(&KappaProfile::expression("-t").unwrap(), &t, 1e-6).unwrap();
    for i in 1..t.len() {
        assert!(r.g[i] > r.lower[i] && r.g[i] < r.upper[i]);
    }
    // κ = -1: the upper bound is attained
    let r = comparison_check(&KappaProfile::constant(-1.0).unwrap(), &t, 1e-6).unwrap();
    assert!(r.g.iter().zip(&r.upper).all(|(g, u)| rel(*g, u.max(1e-300)) < 1e-8 || *u == 0.0));
}

#[test]
fn comparison_on_random_nonincreasing_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = grid(0.0, 20.0, 50);
    for _ in 0..10 {
        let knots = grid(0.0, 20.0, 9);
        let mut k = -rng.gen_range(0.0..0.3);
        let mut values = Vec::new();
        for _ in &knots {
            values.push(k);
            k -= rng.gen_range(0.0..0.3);
        }
        let p = KappaProfile::tabulated(knots, values).unwrap();
        let r = comparison_check(&p, &t, 1e-6).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn increasing_profile_can_violate_the_upper_bound() {
    // κ jumps from -4 to 0: G keeps the sinh growth, but χ(√-κ(t), t) = t
    let p = KappaProfile::tabulated(vec![0.0, 2.0, 2.01], vec![-4.0, -4.0, 0.0]).unwrap();
    let r = comparison_check(&p, &[1.0, 5.0], 1e-6).unwrap();
    assert!(!r.holds);
}

#[test]
fn k_factor_flat_closed_form() {
    let p = KappaProfile::constant(0.0).unwrap();
    let k = k_factor(10.0, 0.1, &p, 1).unwrap();
    let exact = 10f64.powi(-1) * 30f64.ln().powf(1.21) / 10f64.powf(-1.1);
    assert!(rel(k, exact) < 1e-8, "{k} vs {exact}");
    assert!(matches!(k_factor(0.2, 0.1, &p, 1), Err(Error::InvalidInput(_))));
}

#[test]
fn log_k_growth() {
    let r: Vec<f64> = (0..30).map(|k| 10f64.powf(0.5 + 3.5 * k as f64 / 29.0)).collect();
    let flat = log_k_bound_check(&r, 0.1, &KappaProfile::constant(0.0).unwrap(), 2).unwrap();
    assert!(flat.holds, "{flat:?}");
    // log K / log r → (2m-1) δ for m ≥ 2
    let last = r.len() - 1;
    let slope = (flat.log_plus_k[last] - flat.log_plus_k[last - 5]) / (r[last].ln() - r[last - 5].ln());
    assert!((slope - 0.3).abs() < 1e-3, "{slope}");

    let r = grid(1.0, 40.0, 30);
    let hyp = log_k_bound_check(&r, 0.1, &KappaProfile::constant(-1.0).unwrap(), 1).unwrap();
    assert!(hyp.holds, "{hyp:?}");
}

#[test]
fn h_factor_closed_forms() {
    let v = VolumeProfile::power(1.0, 4.0).unwrap();
    for r in [0.5, 2.0, 17.0] {
        let (h, hd) = h_factors(&v, r, 0.0).unwrap();
        assert!((h - 0.5).abs() < 1e-10 && (hd - 0.5).abs() < 1e-10);
    }
    let (_, hd) = h_factors(&v, 2.0, 0.5).unwrap();
    assert!(rel(hd, 0.5 * 8f64.powf(0.5)) < 1e-12);
    assert!(matches!(h_factors(&VolumeProfile::power(1.0, 2.0).unwrap(), 2.0, 0.0), Err(Error::NonParabolicityViolated)));

    let e = VolumeProfile::expression("t^4").unwrap();
    let (h, _) = h_factors(&e, 3.0, 0.0).unwrap();
    assert!((h - 0.5).abs() < 1e-10, "{h}");
    let e = VolumeProfile::expression("t^4 + t^3").unwrap();
    let exact = {
        // ∫_r^∞ dt/(t³+t²) = 1/r - log(1 + 1/r)
        let r = 2.0f64;
        1.0 / r - (1.0 + 1.0 / r).ln()
    };
    assert!(rel(e.tail_integral(2.0).unwrap(), exact) < 1e-8);
    assert!(matches!(VolumeProfile::expression("t^2 + 1").unwrap().tail_integral(1.0), Err(Error::NonParabolicityViolated)));
}

#[test]
fn green_band_examples() {
    let v = VolumeProfile::power(1.0, 4.0).unwrap();
    assert!((green_band(&v, 2.0, 1.0, 1.0).unwrap().integral - 0.125).abs() < 1e-15);
    assert!((green_band(&v, 1.0, 1.0, 1.0).unwrap().integral - 0.5).abs() < 1e-15);
    let b = green_band(&v, 1e6, 0.5, 2.0).unwrap();
    assert!(b.integral < 1e-11 && b.lower < b.integral && b.upper > b.integral);
}
