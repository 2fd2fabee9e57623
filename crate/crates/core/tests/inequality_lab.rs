use std::f64::consts::PI;

use makai_core::families::{make_body, makai_constant, Family, FamilySpec};
use makai_core::fem::{ball_torsion, SolverConfig};
use makai_core::lab::{
    c1, c2, certify_polynomials, evaluate, evaluate_family, h_coefficients, sweep, TorsionMethod,
};

fn fast() -> SolverConfig {
    SolverConfig {
        refinements: Some(1),
        ..SolverConfig::default()
    }
}

#[test]
fn constants_from_their_definitions() {
    assert_eq!(c1(2), 0.25);
    assert_eq!(c2(2), 1.0);
    assert!((makai_constant(2) - 2.0 / 3.0).abs() < 1e-16);
    assert!((makai_constant(3) - 0.9).abs() < 1e-16);
}

#[test]
fn ball_functional_is_three_fifths() {
    let t = ball_torsion(3, 1.0);
    assert!((t - 4.0 * PI / 45.0).abs() < 1e-16);
    let f = t * (4.0 * PI).powi(2) / (4.0 * PI / 3.0).powi(3);
    assert!((f - 0.6).abs() < 1e-14);
}

#[test]
fn unit_square_report() {
    let r = evaluate_family(&FamilySpec::boxed(&[1.0, 1.0]), &fast()).unwrap();
    assert_eq!(r.method, TorsionMethod::Series);
    assert!((r.values.f_extrapolated - 0.5623).abs() < 1e-4);
    assert!(r.values.f_lower <= r.values.f_d2);
    // Tangential: ∫d²·P²/|Ω|³ = 16/24 = 2/3 exactly.
    assert!((r.values.f_d2 - 2.0 / 3.0).abs() < 1e-13);
    assert!(r.all_pass(), "{:?}", r.failures());
}

#[test]
fn polygonal_disk_report() {
    let disk = make_body(&FamilySpec::regular_polygon(64, 1.0, false)).unwrap();
    let r = evaluate(&disk, "disk", &fast()).unwrap();
    assert!((r.values.f_lower - 0.5).abs() < 0.02);
    assert!(r.remainders.gamma < 0.01);
    assert!(r.all_pass(), "{:?}", r.failures());
}

#[test]
fn planar_cone_uses_finite_elements_and_passes() {
    let r = evaluate_family(&FamilySpec::cone(2, 10.0), &fast()).unwrap();
    assert_eq!(r.method, TorsionMethod::Fem);
    assert!(r.values.f_lower < 2.0 / 3.0);
    assert!(r.values.f_lower > 0.6);
    assert!(r.all_pass(), "{:?}", r.failures());
}

#[test]
fn evaluation_is_scale_invariant() {
    let body = make_body(&FamilySpec::random_hull(2, 12, 9)).unwrap();
    let base = evaluate(&body, "b", &fast()).unwrap();
    for s in [0.5, 3.0] {
        let r = evaluate(&body.scaled(s), "b", &fast()).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1e-12);
        assert!(close(r.values.f_lower, base.values.f_lower), "s = {s}");
        assert!(close(r.values.f_d2, base.values.f_d2));
        assert!(close(r.remainders.alpha, base.remainders.alpha));
        assert!(close(r.remainders.beta, base.remainders.beta));
        assert!(close(r.remainders.gamma, base.remainders.gamma));
        for (a, b) in r.checks.iter().zip(&base.checks) {
            assert_eq!(a.pass, b.pass);
        }
    }
}

#[test]
fn dimension_two_certificate() {
    assert_eq!(h_coefficients(2), vec![-6, 16, -12, 0, 2]);
    let c = certify_polynomials(2, 1000).unwrap();
    assert!(c.all_pass());
    assert_eq!(c.z_tilde, 0.0);
    let c = certify_polynomials(3, 1000).unwrap();
    assert_eq!(c.h[0], -14);
    assert_eq!(c.big_h[0], 14);
}

#[test]
fn certificates_up_to_ten() {
    for n in 2..=10 {
        let c = certify_polynomials(n, 1000).unwrap();
        assert!(c.all_pass(), "n = {n}: {:?}", c.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }
}

#[test]
fn thin_cones_approach_the_constant_in_every_dimension() {
    for n in 2..=5 {
        let r = evaluate_family(&FamilySpec::cone(n, 1e4), &fast()).unwrap();
        assert_eq!(r.method, TorsionMethod::ThinEstimate);
        let c = makai_constant(n);
        assert!((r.values.f_extrapolated - c).abs() < 1e-3 * c);
        assert!(r.all_pass());
    }
}

#[test]
fn cylinder_sweep_heads_to_the_lower_constant() {
    let base = FamilySpec::new(Family::Cylinder, 3);
    let rep = sweep(&base, "ell", &[10.0, 100.0, 1000.0], &fast()).unwrap();
    assert!(rep.f_strictly_decreasing);
    let last = rep.rows.last().unwrap();
    assert!((last.f_extrapolated - 1.0 / 3.0).abs() < 0.01);
    assert!((last.gamma - 2.0).abs() < 0.01);
    assert!(rep.all_pass());
}
