use algebroid::field::{Coefficient, FieldOp, GaussianRational, Poly, RationalFunction};
use algebroid::Complex64;
use proptest::prelude::*;

fn gr() -> impl Strategy<Value = GaussianRational> {
    (-9i64..10, 1i64..5, -9i64..10, 1i64..5).prop_map(|(a, b, c, d)| {
        &GaussianRational::from_ratio(a, b) + &(&GaussianRational::from_ratio(c, d) * &GaussianRational::i())
    })
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(gr(), 1..=max_deg + 1).prop_map(Poly::new)
}

fn rational() -> impl Strategy<Value = RationalFunction> {
    (poly(3), poly(2)).prop_filter_map("zero denominator", |(n, d)| RationalFunction::new(n, d).ok())
}

fn nonzero_rational() -> impl Strategy<Value = RationalFunction> {
    rational().prop_filter("zero", |f| !f.is_zero())
}

fn point() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

const OPS: [FieldOp; 4] = [FieldOp::Add, FieldOp::Sub, FieldOp::Mul, FieldOp::Div];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eval_commutes_with_arith(a in rational(), b in nonzero_rational(), z in point(), k in 0usize..4) {
        let op = OPS[k];
        let (ca, cb) = (Coefficient::exact(a), Coefficient::exact(b));
        let c = ca.arith(&cb, op).unwrap();
        // stay away from poles, where values are not comparable
        let (va, vb, vc) = match (ca.eval(z), cb.eval(z), c.eval(z)) {
            (Ok(x), Ok(y), Ok(w)) => (x, y, w),
            _ => return Ok(()),
        };
        prop_assume!(va.norm() < 1e6 && vb.norm() < 1e6 && vb.norm() > 1e-6);
        let want = match op {
            FieldOp::Add => va + vb,
            FieldOp::Sub => va - vb,
            FieldOp::Mul => va * vb,
            FieldOp::Div => va / vb,
        };
        prop_assert!(rel(vc, want) < 1e-12, "{vc} vs {want}");
        // results are normalized
        let f = c.as_exact().unwrap();
        prop_assert!(f.numer().gcd(f.denom()).is_constant());
        prop_assert!(f.denom().leading().is_one());
        prop_assert_eq!(&f.normalize(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn field_axioms(a in rational(), b in rational(), c in rational(), d in nonzero_rational()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert!(d.mul(&d.inv().unwrap()).is_one());
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&RationalFunction::one()), a.clone());
        prop_assert_eq!(a.div(&d).unwrap().mul(&d), a);
    }

    #[test]
    fn normalize_is_idempotent(n in poly(4), d in poly(3), common in poly(2)) {
        prop_assume!(!d.is_zero() && !common.is_zero());
        let f = RationalFunction::new(&n * &common, &d * &common).unwrap();
        let g = f.normalize();
        prop_assert_eq!(&g.normalize(), &g);
        prop_assert_eq!(g, RationalFunction::new(n, d).unwrap());
    }
}

#[test]
fn division_by_zero_function() {
    let z = Coefficient::exact(RationalFunction::z());
    let zero = Coefficient::exact(RationalFunction::zero());
    assert_eq!(z.arith(&zero, FieldOp::Div), Err(algebroid::Error::DivisionByZeroFunction));
}
