use super::*;
use crate::fixtures;

#[test]
fn bump_is_a_unit_mass_kernel() {
    let k = MollifierKernel::bump();
    assert!(k.normalization_error() < 1e-10);
    assert_eq!(k.eval(1.0), 0.0);
    assert_eq!(k.eval(-1.3), 0.0);
    assert!(k.eval(0.0) > 0.0);
    assert!((k.transform(0.0).re - 1.0).abs() < 1e-12);
    assert!(k.transform(0.7).im.abs() < 1e-12);
}

#[test]
fn kernels_outside_the_interval_are_rejected() {
    assert!(MollifierKernel::new("wide", |u| (-u * u).exp()).is_err());
    assert!(MollifierKernel::new("signed", |u| if u.abs() < 1.0 { u } else { 0.0 }).is_err());
}

#[test]
fn mollified_circle_is_a_shrunk_circle() {
    let kernel = MollifierKernel::bump();
    let eps = 0.05;
    let m = mollify(&fixtures::circle(1.0), eps, &kernel).unwrap();
    let factor = kernel.transform(eps).re;
    assert!(factor < 1.0 && factor > 0.9);
    for s in [0.0, 0.13, 0.5, 0.77] {
        assert!((m.eval(s).norm() - factor).abs() < 1e-12);
    }
}

#[test]
fn mollified_square_is_smooth_and_close() {
    let square = fixtures::unit_square();
    let (m, rep) = mollify_report(&square, 0.01, &MollifierKernel::bump()).unwrap();
    assert!(m.is_smooth());
    assert!(rep.max_deviation <= 0.01 * square.length());
    assert!(rep.max_deviation <= rep.continuity_bound);
    // Corners are cut: the vertex is no longer on the curve.
    assert!(m.project(Complex64::new(1.0, 1.0)).distance > 1e-3);
    assert!(m.curvature(0.25).is_finite());
}

#[test]
fn deviation_shrinks_with_eps() {
    let oval = fixtures::quartic_oval();
    let samples: Vec<Point> = oval.sample(256);
    let curve = JordanCurve::from_samples(&samples).unwrap();
    let kernel = MollifierKernel::bump();
    let devs: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&e| mollify_report(&curve, e, &kernel).unwrap().1.max_deviation)
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(devs[3] < 1e-3);
}

#[test]
fn mollification_commutes_with_rigid_motions() {
    let kernel = MollifierKernel::bump();
    let base = fixtures::unit_square();
    let rot = Complex64::from_polar(1.0, 0.7);
    let shift = Complex64::new(3.0, -2.0);
    let a = mollify(&base.similarity(rot, shift).unwrap(), 0.02, &kernel).unwrap();
    let b = mollify(&base, 0.02, &kernel).unwrap();
    for i in 0..64 {
        let s = i as f64 / 64.0;
        assert!((a.eval(s) - (b.eval(s) * rot + shift)).norm() < 1e-10);
    }
    let t = mollify(&base.similarity(Complex64::new(1.0, 0.0), shift).unwrap(), 0.02, &kernel).unwrap();
    for i in 0..64 {
        let s = i as f64 / 64.0;
        assert!((t.eval(s) - (b.eval(s) + shift)).norm() < 1e-12);
    }
}

#[test]
fn rescaled_mollification_keeps_area() {
    let square = fixtures::unit_square();
    let m = mollify(&square, 0.01, &MollifierKernel::bump()).unwrap();
    let r = m.rescale_to_area(1.0).unwrap();
    assert!((r.area() - 1.0).abs() < 1e-12);
}

#[test]
fn eps_out_of_range() {
    let c = fixtures::circle(1.0);
    let k = MollifierKernel::bump();
    assert!(matches!(mollify(&c, 0.0, &k), Err(TrapezeError::Domain(_))));
    assert!(matches!(mollify(&c, 0.6, &k), Err(TrapezeError::Domain(_))));
}

#[test]
fn square_constants() {
    let square = fixtures::unit_square();
    let g = lipschitz_constants(&square, 1.0).unwrap();
    assert!((g.mu_k - (2f64.sqrt() - 1.0)).abs() < 1e-3, "{}", g.mu_k);
    assert!((g.mu - 0.5).abs() < 1e-9);
    assert!(g.mu_k <= g.mu);
    assert!(matches!(
        lipschitz_constants(&square, 0.5),
        Err(TrapezeError::NotGraphical { .. })
    ));
}

#[test]
fn circle_constants_grow_with_k() {
    let circle = fixtures::circle(1.0);
    let mut last = 0.0;
    for k in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let g = lipschitz_constants(&circle, k).unwrap();
        let exact = k / (1.0 + k * k).sqrt();
        assert!((g.mu_k - exact).abs() < 0.01 * exact, "{k}: {} vs {exact}", g.mu_k);
        assert!(g.mu_k > last);
        assert!(g.mu_k <= g.mu);
        last = g.mu_k;
    }
}

#[test]
fn square_constants_survive_mollification() {
    let rep = mollify_preserves(&fixtures::unit_square(), 1.0, &[0.02, 0.01, 0.005]).unwrap();
    assert!(rep.mu_k_preserved && rep.mu_preserved);
    assert!(rep.converging && rep.deviation_decreasing);
    assert!(rep.rungs.windows(2).all(|w| w[1].mu_k >= w[0].mu_k));
}

#[test]
fn circle_constants_are_stable() {
    let rep = mollify_preserves(&fixtures::circle(1.0), 1.0, &[0.02, 0.01]).unwrap();
    for rung in &rep.rungs {
        assert!((rung.mu_k - rep.base.mu_k).abs() < 0.01 * rep.base.mu_k);
        assert!((rung.mu - rep.base.mu).abs() < 0.01 * rep.base.mu);
    }
}

#[test]
fn preservation_requires_the_input_to_qualify() {
    let err = mollify_preserves(&fixtures::unit_square(), 0.5, &[0.01]);
    assert!(matches!(err, Err(TrapezeError::NotGraphical { .. })));
}

#[test]
fn angle_bounds() {
    let square = fixtures::unit_square();
    assert!((angle_bound(&square, 0.25) - 4.0 / 3.0).abs() < 1e-12);
    assert!((angle_bound(&square, 0.5) - 2.0).abs() < 1e-12);
}

#[test]
fn circle_experiment_uses_the_curve_directly() {
    let rep = theorem_a_experiment(&fixtures::circle(1.0), 0.25, &[0.5, 1.5, 2.5], &[0.01], 64).unwrap();
    assert!(rep.pass);
    assert!((rep.angle_bound - PI / 1.5).abs() < 1e-12);
    assert!(!rep.samples[2].admissible);
    for s in rep.samples.iter().filter(|s| s.admissible) {
        assert_eq!(s.rungs.len(), 1);
        assert_eq!(s.rungs[0].eps, None);
        let w = s.rungs[0].witness.unwrap();
        let exact = 1.0 / (0.25 + 0.0625 * (0.5 * s.theta).tan().powi(2)).sqrt();
        assert!((w.diag_length - exact).abs() < 1e-8);
    }
}

#[test]
fn square_rectangles_below_the_bound() {
    let rep = theorem_a_experiment(&fixtures::unit_square(), 0.5, &[0.5, 1.5, 2.5], &[0.02], 64).unwrap();
    assert!(rep.pass);
    assert!(rep.samples[0].admissible && rep.samples[1].admissible);
    assert!(!rep.samples[2].admissible && rep.samples[2].rungs.is_empty());
}
