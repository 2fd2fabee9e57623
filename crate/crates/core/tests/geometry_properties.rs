use makai_core::families::{make_body, FamilySpec};
use makai_core::fem::integrate_d_squared;
use makai_core::geometry::ConvexBody;
use proptest::prelude::*;

fn hull(dim: usize, seed: u64) -> ConvexBody {
    let count = if dim == 2 { 12 } else { 16 };
    make_body(&FamilySpec::random_hull(dim, count, seed)).unwrap()
}

fn tangential(dim: usize, seed: u64) -> ConvexBody {
    let count = if dim == 2 { 8 } else { 12 };
    make_body(&FamilySpec::tangential_random(dim, count, seed)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn remainders_sum_to_n_minus_one(dim in 2usize..=3, seed in 1u64..500) {
        let s = hull(dim, seed).summarize().unwrap();
        prop_assert!((s.beta + s.gamma - (dim as f64 - 1.0)).abs() < 1e-12);
        prop_assert!(s.beta > 0.0 && s.beta <= dim as f64 - 1.0 + 1e-12);
        prop_assert!(s.gamma >= -1e-12);
        prop_assert!(s.alpha > 0.0 && s.alpha <= 1.0);
    }

    #[test]
    fn functionals_scale_with_the_right_powers(dim in 2usize..=3, seed in 1u64..500, s in 0.2f64..5.0) {
        let b = hull(dim, seed);
        let c = b.scaled(s);
        let n = dim as i32;
        prop_assert!(rel(c.volume(), s.powi(n) * b.volume()) < 1e-10);
        prop_assert!(rel(c.perimeter(), s.powi(n - 1) * b.perimeter()) < 1e-10);
        prop_assert!(rel(c.inradius(), s * b.inradius()) < 1e-9);
        prop_assert!(rel(c.diameter(), s * b.diameter()) < 1e-10);
        let (sb, sc) = (b.summarize().unwrap(), c.summarize().unwrap());
        prop_assert!((sb.alpha - sc.alpha).abs() < 1e-9);
        prop_assert!((sb.beta - sc.beta).abs() < 1e-9);
        prop_assert!((sb.gamma - sc.gamma).abs() < 1e-9);
        let d2 = integrate_d_squared(&b).value;
        prop_assert!(rel(integrate_d_squared(&c).value, s.powi(n + 2) * d2) < 1e-9);
    }

    #[test]
    fn translation_changes_nothing(seed in 1u64..500, dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let b = hull(2, seed);
        let c = b.translated(&[dx, dy]);
        prop_assert!(rel(c.volume(), b.volume()) < 1e-10);
        prop_assert!(rel(c.perimeter(), b.perimeter()) < 1e-10);
        prop_assert!(rel(c.inradius(), b.inradius()) < 1e-9);
    }

    #[test]
    fn boundary_distance_is_concave(dim in 2usize..=3, seed in 1u64..500, u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
        // Points along a chord between two vertices pulled toward the incenter.
        let b = hull(dim, seed);
        let verts = b.vertices();
        let p = &verts[0];
        let q = &verts[verts.len() / 2];
        let c = b.incenter();
        let pull = |x: &[f64]| -> Vec<f64> { x.iter().zip(c).map(|(a, o)| o + 0.9 * (a - o)).collect() };
        let (p, q) = (pull(p), pull(q));
        let lerp = |t: f64| -> Vec<f64> { p.iter().zip(&q).map(|(a, b)| a + t * (b - a)).collect() };
        let (t0, t1) = (u.min(v), u.max(v));
        let tm = t0 + w * (t1 - t0);
        let d = |t: f64| b.distance_to_boundary(&lerp(t)).unwrap();
        let chord = d(t0) + w * (d(t1) - d(t0));
        prop_assert!(d(tm) >= chord - 1e-12);
    }

    #[test]
    fn erosion_shrinks_measure_and_perimeter(dim in 2usize..=3, seed in 1u64..500, a in 0.0f64..0.99, b in 0.0f64..0.99) {
        let body = hull(dim, seed);
        let r = body.inradius();
        let (t0, t1) = (a.min(b) * r, a.max(b) * r);
        let (v0, p0) = body.eroded_measures(t0);
        let (v1, p1) = body.eroded_measures(t1);
        prop_assert!(v1 <= v0 * (1.0 + 1e-12));
        prop_assert!(p1 <= p0 * (1.0 + 1e-12));
        // Inclusion bounds (1 − t/R)ⁿ|Ω| ≤ |Ω_t|.
        let s = 1.0 - t1 / r;
        prop_assert!(s.powi(dim as i32) * body.volume() <= v1 * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn tangential_bodies_have_gamma_zero(dim in 2usize..=3, seed in 1u64..500) {
        let s = tangential(dim, seed).summarize().unwrap();
        prop_assert!(s.gamma.abs() < 1e-10);
    }
}

#[test]
fn erosion_of_the_unit_square() {
    let sq = make_body(&FamilySpec::boxed(&[1.0, 1.0])).unwrap();
    for t in [0.0, 0.1, 0.25, 0.4] {
        let (v, p) = sq.eroded_measures(t);
        assert!((v - (1.0 - 2.0 * t).powi(2)).abs() < 1e-13);
        assert!((p - 4.0 * (1.0 - 2.0 * t)).abs() < 1e-13);
    }
}
