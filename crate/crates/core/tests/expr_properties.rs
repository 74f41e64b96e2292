mod common;

use common::{fd_jacobian, field, gallery_fields, points};
use linefib::{parse_expression, Dual3, Vec3};
use proptest::prelude::*;

#[test]
fn dual_jacobian_matches_central_differences() {
    let pts = points(11, 100, 2.0);
    for (name, f) in gallery_fields() {
        for p in &pts {
            let jet = f.evaluate_jet(p).unwrap();
            let fd = fd_jacobian(&f, p, 1e-5);
            let diff = jet.jacobian.max_abs_diff(&fd);
            assert!(diff < 1e-6, "{name} at {p:?}: {diff}");
        }
    }
}

#[test]
fn dual_jacobian_matches_finer_differences() {
    let pts = points(12, 100, 2.0);
    for (name, f) in gallery_fields() {
        for p in &pts {
            let jet = f.evaluate_jet(p).unwrap();
            let diff = jet.jacobian.max_abs_diff(&fd_jacobian(&f, p, 1e-6));
            assert!(diff < 1e-5, "{name} at {p:?}: {diff}");
        }
    }
}

#[test]
fn normalized_fields_are_unit() {
    let fields = [
        field("z*x-y,x+z*y,1+z^2", true),
        field("-y,x,1", true),
        field("x^2+1,sin(y),exp(z)", true),
        field("3,4,12", true),
    ];
    for f in &fields {
        for p in points(13, 100, 2.0) {
            let v = f.evaluate(&p).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-14, "{f} at {p:?}");
        }
    }
}

#[test]
fn normalization_is_differentiated() {
    let f = field("3*x,4,0", true);
    let p = Vec3::new(1.0, 0.0, 0.0);
    let j = f.evaluate_jet(&p).unwrap().jacobian;
    // d/dx of (3x, 4) / sqrt(9x^2 + 16) at x = 1.
    assert!((j.0[0][0] - 16.0 * 3.0 / 125.0_f64).abs() < 1e-15);
    assert!((j.0[1][0] + 4.0 * 9.0 / 125.0_f64).abs() < 1e-15);
}

#[test]
fn evaluation_agrees_with_hand_values() {
    let cases: [(&str, f64); 6] = [
        ("2^3^2", 512.0),
        ("-2^2", -4.0),
        ("2*-3", -6.0),
        ("1-2-3", -4.0),
        ("8/2/2", 2.0),
        ("atan2(1, 1)*4", std::f64::consts::PI),
    ];
    for (text, want) in cases {
        let e = parse_expression(text).unwrap();
        let got: f64 = e.eval(&[0.0, 0.0, 0.0]).unwrap();
        assert!((got - want).abs() < 1e-15, "{text}: {got}");
    }
}

#[test]
fn dual_partials_of_expression() {
    let e = parse_expression("x*y^2 + sin(z)").unwrap();
    let d: Dual3<f64> = e.eval(&Dual3::seed([2.0, 3.0, 0.5])).unwrap();
    assert!((d.value - (18.0 + 0.5f64.sin())).abs() < 1e-14);
    assert_eq!(d.partials[0], 9.0);
    assert_eq!(d.partials[1], 12.0);
    assert!((d.partials[2] - 0.5f64.cos()).abs() < 1e-15);
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..1000).prop_map(|n| n.to_string()),
        (0u32..1000, 1u32..100).prop_map(|(a, b)| format!("{a}.{b}")),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("z".to_string()),
        Just("pi".to_string()),
        Just("e".to_string()),
        Just("1.5e-3".to_string()),
    ]
}

fn expression() -> impl Strategy<Value = String> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let funcs = prop::sample::select(vec![
            "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "atan",
        ]);
        let ops = prop::sample::select(vec!["+", "-", "*", "/", "^"]);
        prop_oneof![
            (
                inner.clone(),
                ops,
                inner.clone(),
                any::<bool>(),
                any::<bool>()
            )
                .prop_map(|(a, op, b, pa, pb)| {
                    let a = if pa { format!("({a})") } else { a };
                    let b = if pb { format!("({b})") } else { b };
                    format!("{a} {op} {b}")
                }),
            inner.clone().prop_map(|a| format!("-({a})")),
            (funcs, inner.clone()).prop_map(|(f, a)| format!("{f}({a})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("atan2({a}, {b})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn print_then_parse_is_identity(s in expression()) {
        let Ok(first) = parse_expression(&s) else {
            return Err(TestCaseError::reject("outside the grammar"));
        };
        let printed = first.to_string();
        let second = parse_expression(&printed).expect("printed form parses");
        prop_assert_eq!(&second, &first, "{} printed as {}", s, printed);
        prop_assert_eq!(second.to_string(), printed);
    }
}
