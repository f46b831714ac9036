use algebroid::field::Backend;
use algebroid::problem::{CurveSpec, ProblemFile, RadiusGrid, Tolerances};
use algebroid::Error;
use proptest::prelude::*;

fn coefficient() -> impl Strategy<Value = String> {
    prop_oneof![
        (-9i64..10).prop_map(|a| a.to_string()),
        (-9i64..10, -9i64..10).prop_map(|(a, b)| format!("{a}*z + {b}")),
        (1i64..5, -3i64..4).prop_map(|(a, b)| format!("(z^{a} - {b})/(z + 7)")),
    ]
}

fn component() -> impl Strategy<Value = Vec<String>> {
    (1usize..4).prop_flat_map(|nu| {
        (prop::collection::vec(coefficient(), nu), (1i64..5).prop_map(|a| a.to_string())).prop_map(|(mut c, lead)| {
            c.push(lead);
            c
        })
    })
}

fn positive() -> impl Strategy<Value = f64> {
    (1e-12f64..1.0).prop_map(|x| x)
}

fn problem() -> impl Strategy<Value = ProblemFile> {
    (
        prop::collection::vec(component(), 1..3),
        (1.0f64..10.0, 2.0f64..50.0, 2usize..40),
        any::<bool>(),
        prop::collection::vec((-5i64..6, -5i64..6), 0..4),
        (positive(), positive(), positive(), positive(), positive()),
        (0.0f64..0.5, any::<u64>(), (-3i64..4, -3i64..4)),
    )
        .prop_map(|(components, (rmin, span, steps), with_grid, values, tol, (delta, seed, (bx, by)))| {
            let rmax = rmin * span;
            let n = components.len();
            let mut targets: Vec<String> = if n == 1 {
                values.iter().map(|(a, b)| format!("value:{a}+({b})*i")).collect()
            } else {
                values.iter().map(|(a, b)| format!("hyperplane:{a},{b},1")).filter(|_| n == 2).collect()
            };
            if n == 1 {
                targets.push("inf".into());
            }
            ProblemFile {
                curve: CurveSpec { backend: Backend::Exact, components },
                disk_radius: rmax * 1.5,
                base_point: format!("{bx}/10+({by}/10)*i"),
                r_grid: with_grid.then_some(RadiusGrid { rmin, rmax, steps }),
                targets,
                tolerances: Tolerances {
                    quadrature: tol.0,
                    separation: tol.1,
                    cluster: tol.2,
                    min_clearance: tol.3,
                    epsilon_margin: tol.4,
                },
                delta,
                seed,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn json_round_trip(p in problem()) {
        prop_assume!(p.validate().is_ok());
        let text = p.to_json();
        let back = ProblemFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_json(), text);
    }
}

#[test]
fn defaults_are_filled_in() {
    let p = ProblemFile::parse(r#"{"curve": {"backend": "exact", "components": [["-z", "0", "1"]]}, "disk_radius": 10}"#)
        .unwrap();
    assert_eq!(p.base_point, "0");
    assert_eq!(p.delta, 0.05);
    assert_eq!(p.tolerances, Tolerances::default());
    assert!(p.radii().is_err());
}

#[test]
fn syntax_errors_carry_position() {
    let err = ProblemFile::parse("{\n  \"curve\": {\n    \"backend\": \"exact\",, \n").unwrap_err();
    match err {
        Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 24)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        ProblemFile::parse(r#"{"curve": {"backend": "exact", "components": [["-z", "0", "1"]]}, "disk_radius": 10, "extra": 1}"#),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn grid_must_fit_in_disk() {
    let text = r#"{"curve": {"backend": "exact", "components": [["-z", "0", "1"]]}, "disk_radius": 10,
                   "r_grid": {"rmin": 1, "rmax": 20, "steps": 5}}"#;
    assert!(matches!(ProblemFile::parse(text), Err(Error::InvalidInput(_))));
}
