//! Cross-module invariants on randomly drawn curves and classes.

use num_complex::Complex64;
use proptest::prelude::*;
use trapeze::action_lab::{action, action_with_path, capping_path, shifted_capping};
use trapeze::approx::{mollify_report, MollifierKernel};
use trapeze::fixtures;
use trapeze::inscriber::{find_inscriptions, Kind, DEFAULT_TOL};
use trapeze::spectral::spectrum;
use trapeze::trapezoid_map::diagonal_report;
use trapeze::{PointPair, TrapezoidClass};

fn class() -> impl Strategy<Value = TrapezoidClass> {
    (0.05f64..=0.5, 0.2f64..2.9).prop_map(|(r, t)| TrapezoidClass::new(r, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inscriptions_have_the_requested_shape(b in 0.4f64..1.0, class in class()) {
        let curve = fixtures::ellipse(1.0, b);
        let set = find_inscriptions(&curve, class, 64, DEFAULT_TOL).unwrap();
        prop_assert!(!set.is_empty());
        for ins in &set.inscriptions {
            let rep = diagonal_report(PointPair::new(ins.z(), ins.w()), PointPair::new(ins.zp(), ins.wp())).unwrap();
            prop_assert!((rep.ratio_first - class.r).abs() < 1e-8);
            prop_assert!((rep.ratio_second - class.r).abs() < 1e-8);
            prop_assert!((rep.angle - class.theta).abs() < 1e-8);
            prop_assert!((rep.length_first - rep.length_second).abs() < 1e-9);
            for v in ins.vertices {
                prop_assert!(curve.project(v).distance.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn action_is_invariant_under_rigid_motion(angle in 0.0f64..6.28, tx in -3.0f64..3.0, ty in -3.0f64..3.0,
                                              scale in 0.5f64..2.0) {
        let base = fixtures::ellipse(1.5, 1.0);
        let moved = base.similarity(Complex64::from_polar(scale, angle), Complex64::new(tx, ty)).unwrap();
        let class = TrapezoidClass::new(0.3, 1.1).unwrap();
        let a = spectrum(&base, class, 64).unwrap().values();
        let b = spectrum(&moved, class, 64).unwrap().values();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x * scale * scale - y).abs() < 1e-7 * (1.0 + y.abs()), "{} vs {}", x * scale * scale, y);
        }
    }

    #[test]
    fn winding_shift_moves_action_by_area(k in -2i64..=2, b in 0.5f64..1.0, class in class()) {
        let curve = fixtures::ellipse(1.0, b);
        let set = find_inscriptions(&curve, class, 64, DEFAULT_TOL).unwrap();
        let area = curve.area();
        for ins in set.inscriptions.iter().filter(|i| i.kind == Kind::Elegant) {
            let base = capping_path(&curve, ins).unwrap();
            let shifted = shifted_capping(&curve, ins, &base, k).unwrap();
            let a0 = action_with_path(&curve, ins, &base).value;
            let a1 = action_with_path(&curve, ins, &shifted).value;
            prop_assert!((a1 - a0 + k as f64 * area).abs() < 1e-7 * area);
            prop_assert!((action(&curve, ins).unwrap().value - a0).abs() < 1e-8 * area);
        }
    }

    #[test]
    fn mollification_stays_within_its_continuity_bound(eps in 0.002f64..0.2) {
        let square = fixtures::unit_square();
        let (smooth, rep) = mollify_report(&square, eps, &MollifierKernel::bump()).unwrap();
        prop_assert!(smooth.is_smooth());
        prop_assert!(rep.max_deviation <= rep.continuity_bound * (1.0 + 1e-9));
        prop_assert!(rep.max_deviation <= eps * square.length());
    }
}
