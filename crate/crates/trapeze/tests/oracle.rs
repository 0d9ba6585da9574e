//! The grid-seeded solver against an exhaustive scan on the fixture corpus.

mod common;

use std::f64::consts::FRAC_PI_2;
use trapeze::inscriber::{find_inscriptions, DEFAULT_TOL};
use trapeze::TrapezoidClass;

const CLASSES: [(f64, f64); 4] = [(0.25, FRAC_PI_2), (0.4, 2.2), (0.5, 1.0), (0.1, 0.5)];

fn check(name: &str) {
    let fx = common::corpus().into_iter().find(|f| f.name == name).unwrap();
    for (r, theta) in CLASSES {
        let class = TrapezoidClass::new(r, theta).unwrap();
        let oracle = common::solve(&fx, class, 1024);
        let set = find_inscriptions(&fx.curve, class, 256, DEFAULT_TOL).unwrap();
        let solver: Vec<common::SolverPoint> = set
            .inscriptions
            .iter()
            .map(|i| common::SolverPoint::new(&fx, class, [i.s1, i.s2], i.family))
            .collect();
        assert!(!oracle.is_empty(), "{name} r={r} theta={theta}: oracle found nothing");
        if let Err(msg) = common::compare(&oracle, &solver, fx.order, 4.0 / 256.0, 1e-6) {
            panic!("{name} r={r} theta={theta}: {msg}");
        }
    }
}

#[test]
fn circle_matches_oracle() {
    check("circle");
}

#[test]
fn ellipse_matches_oracle() {
    check("ellipse");
}

#[test]
fn quartic_matches_oracle() {
    check("quartic");
}

#[test]
fn square_matches_oracle() {
    check("square");
}

#[test]
fn peanut_matches_oracle() {
    check("peanut");
}

#[test]
fn oracle_recovers_the_circle_closed_form() {
    let fx = &common::corpus()[0];
    let class = TrapezoidClass::new(0.25, FRAC_PI_2).unwrap();
    let exact = 4.0 / 5f64.sqrt();
    for s in common::solve(fx, class, 256) {
        let d = (fx.curve.eval(s[0]) - fx.curve.eval(s[1])).norm();
        assert!((d - exact).abs() < 1e-9, "{d}");
    }
}
