mod common;

use common::{field, gallery_fields, points, theta_field};
use linefib::fibration::{
    fibration_audit, line_through, lines_closest_approach, same_line, AuditBox, AuditTolerances,
    Line, RankProfile,
};
use linefib::Vec3;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn line() -> impl Strategy<Value = Line<f64>> {
    (coord(), coord(), coord(), coord(), coord(), coord()).prop_filter_map(
        "nonzero direction",
        |(a, b, c, d, e, f)| {
            Line::new(Vec3::new(a, b, c), Vec3::new(d, e, f)).filter(|l| l.direction.is_finite())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn closest_approach_is_symmetric(l1 in line(), l2 in line()) {
        let a = lines_closest_approach(&l1, &l2);
        let b = lines_closest_approach(&l2, &l1);
        prop_assert_eq!(a.gap.to_bits(), b.gap.to_bits());
        prop_assert_eq!(a.t1.to_bits(), b.t2.to_bits());
        prop_assert_eq!(a.t2.to_bits(), b.t1.to_bits());
        prop_assert_eq!(a.parallel, b.parallel);
    }

    #[test]
    fn crossing_lines_meet_at_their_parameters(
        p in (coord(), coord(), coord()),
        d1 in (coord(), coord(), coord()),
        d2 in (coord(), coord(), coord()),
        s in coord(),
        t in coord(),
    ) {
        let p = Vec3::new(p.0, p.1, p.2);
        let (Some(probe1), Some(probe2)) = (
            Line::new(p, Vec3::new(d1.0, d1.1, d1.2)),
            Line::new(p, Vec3::new(d2.0, d2.1, d2.2)),
        ) else {
            return Err(TestCaseError::reject("zero direction"));
        };
        prop_assume!(probe1.direction.cross(&probe2.direction).norm() > 0.1);
        // Shift the base points along each line so the meeting point is not a base.
        let l1 = Line::new(probe1.point_at(-s), probe1.direction).unwrap();
        let l2 = Line::new(probe2.point_at(-t), probe2.direction).unwrap();
        let ca = lines_closest_approach(&l1, &l2);
        prop_assert!(!ca.parallel);
        prop_assert!(ca.gap < 1e-9);
        prop_assert!((l1.point_at(ca.t1) - l2.point_at(ca.t2)).norm() < 1e-9);
        prop_assert!((l1.point_at(ca.t1) - p).norm() < 1e-9);
    }
}

#[test]
fn parallel_lines_report_offset_and_identity() {
    let l1 = Line::new(Vec3::<f64>::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
    let l2 = Line::new(Vec3::new(5.0, 0.0, 2.0), Vec3::new(-1.0, 0.0, 0.0)).unwrap();
    let ca = lines_closest_approach(&l1, &l2);
    assert!(ca.parallel);
    assert!((ca.gap - 2.0).abs() < 1e-15);
    let l3 = Line::new(Vec3::new(7.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)).unwrap();
    assert!(same_line(&l1, &l3, 1e-7));
    assert!(!same_line(&l1, &l2, 1e-7));
}

#[test]
fn line_level_view_matches_pointwise_view() {
    let bx = AuditBox::cube(-1.0, 1.0).unwrap();
    let tol = AuditTolerances::default();
    let fields = [
        theta_field("z"),
        theta_field("z+z^3/3"),
        field("z*x-y,x+z*y,1+z^2", true),
    ];
    for f in &fields {
        let report = fibration_audit(f, &bx, 4, &tol).unwrap();
        assert!(report.is_fibration_on_box, "{f}");
        let big = bx.enlarged(tol.enlarge);
        for p in points(31, 40, 1.0) {
            let l = line_through(f, &p).unwrap();
            let (a, b) = big.clip(&l).unwrap();
            let v = f.evaluate(&p).unwrap();
            for k in 0..=10 {
                let t = a + (b - a) * k as f64 / 10.0;
                let w = f.evaluate(&l.point_at(t)).unwrap();
                assert!((w - v).norm() < 1e-8, "{f} at {p:?}, t = {t}");
            }
        }
    }
}

#[test]
fn audit_is_deterministic() {
    let bx = AuditBox::cube(-1.0, 1.0).unwrap();
    for (name, f) in gallery_fields() {
        let a = fibration_audit(&f, &bx, 5, &AuditTolerances::default()).unwrap();
        let b = fibration_audit(&f, &bx, 5, &AuditTolerances::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "{name}"
        );
        assert_eq!(a.parallel_pairs, b.parallel_pairs);
    }
}

#[test]
fn audit_outcomes_on_gallery() {
    let bx = AuditBox::cube(-1.0, 1.0).unwrap();
    let tol = AuditTolerances::default();
    let expect = [
        ("constant", true, RankProfile::Constant0),
        ("theta-linear", true, RankProfile::Constant1),
        ("theta-cubic", true, RankProfile::Constant1),
        ("theta-sine", true, RankProfile::Constant1),
        ("skew-hopf", true, RankProfile::Constant2),
    ];
    let all = gallery_fields();
    for (name, fib, profile) in expect {
        let f = &all.iter().find(|(n, _)| *n == name).unwrap().1;
        let r = fibration_audit(f, &bx, 5, &tol).unwrap();
        assert_eq!(r.is_fibration_on_box, fib, "{name}");
        assert_eq!(r.rank_profile, profile, "{name}");
        assert!(r.intersections.is_empty(), "{name}");
    }
    let helix = &all
        .iter()
        .find(|(n, _)| *n == "helix-not-straight")
        .unwrap()
        .1;
    let r = fibration_audit(helix, &bx, 5, &tol).unwrap();
    assert!(!r.is_fibration_on_box);
    assert!(r.straightness_defect_max > 0.1);
}

#[test]
fn crossing_lines_are_flagged() {
    // Radial lines in each horizontal plane are straight but all meet on the z-axis.
    let f = field("x,y,0", true);
    let bx = AuditBox::cube(-1.0, 1.0).unwrap();
    let r = fibration_audit(&f, &bx, 4, &AuditTolerances::default()).unwrap();
    assert!(r.straightness_defect_max < 1e-12);
    assert!(r.unit_defect_max < 1e-12);
    assert!(!r.intersections.is_empty());
    assert!(!r.is_fibration_on_box);
    for hit in &r.intersections {
        assert!(hit.gap < 1e-7);
        assert_eq!(hit.p_i.z(), hit.p_j.z());
    }
}
