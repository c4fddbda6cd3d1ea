use penscat_core::geometry::*;
use penscat_core::math::{Vec2, TAU};
use proptest::prelude::*;

fn curves() -> Vec<ParamCurve> {
    vec![ParamCurve::unit_circle(), ParamCurve::ellipse(2.0, 1.0).unwrap(), ParamCurve::kite()]
}

fn perimeter(curve: &ParamCurve, n: usize) -> f64 {
    let g = BoundaryGrid::new(curve, n).unwrap();
    g.weights().iter().sum()
}

#[test]
fn circle_grid_has_circumference() {
    let g = BoundaryGrid::new(&ParamCurve::unit_circle(), 8).unwrap();
    assert_eq!(g.len(), 8);
    for (i, x) in g.x.iter().enumerate() {
        assert!((x.norm() - 1.0).abs() < 1e-15);
        assert_eq!(g.t[i], TAU * i as f64 / 8.0);
    }
    assert!((perimeter(&ParamCurve::unit_circle(), 8) - TAU).abs() < 1e-12);
}

#[test]
fn grid_matches_curve_evaluation() {
    let c = ParamCurve::kite();
    let g = BoundaryGrid::new(&c, 64).unwrap();
    for i in 0..64 {
        let s = curve_eval(&c, g.t[i]);
        assert_eq!(g.x[i], s.point);
        assert_eq!(g.normal[i], s.normal);
        assert_eq!(g.jac[i], s.jacobian);
    }
}

#[test]
fn kite_perimeter_converges_spectrally() {
    let c = ParamCurve::kite();
    let e64 = (perimeter(&c, 64) - perimeter(&c, 256)).abs();
    let e128 = (perimeter(&c, 128) - perimeter(&c, 256)).abs();
    assert!(e128 < 1e-10, "{e128}");
    assert!(e64 / e128 > 1e4, "{e64} {e128}");
}

#[test]
fn ellipse_perimeter_matches_elliptic_integral() {
    // 4a E(1 − b²/a²) from scipy.special.ellipe.
    let reference = 9.688448220547675;
    let p = perimeter(&ParamCurve::ellipse(2.0, 1.0).unwrap(), 256);
    assert!((p - reference).abs() < 1e-10, "{p}");
}

#[test]
fn containment_examples() {
    let c = ParamCurve::unit_circle();
    assert_eq!(contains_point(&c, Vec2::new(0.0, 0.0), 1e-9), Containment::Inside);
    assert_eq!(contains_point(&c, Vec2::new(2.0, 0.0), 1e-9), Containment::Outside);
    assert_eq!(contains_point(&c, Vec2::new(1.0 + 1e-12, 0.0), 1e-9), Containment::NearBoundary);
}

#[test]
fn offsets_along_the_normal_classify_correctly() {
    for c in curves() {
        let tester = InsideTester::new(&c);
        for i in 0..97 {
            let t = TAU * i as f64 / 97.0;
            let s = curve_eval(&c, t);
            assert_eq!(tester.classify(s.point + s.normal * 1e-3), Containment::Outside);
            assert_eq!(tester.classify(s.point - s.normal * 1e-3), Containment::Inside);
        }
    }
}

#[test]
fn probe_domain_area_matches_lens() {
    // Area of B((1,0), 0.2) ∩ unit disk from the circle–circle lens formula.
    let lens = 0.060162511127129226;
    let p = build_probe_domain(&ParamCurve::unit_circle(), 0.0, 0.2, 16).unwrap();
    assert!((p.area() - lens).abs() < 1e-3 * lens, "{}", p.area());
    let finer = build_probe_domain(&ParamCurve::unit_circle(), 0.0, 0.2, 32).unwrap();
    assert!((finer.area() - p.area()).abs() < 1e-4 * p.area());
}

#[test]
fn small_probe_is_a_half_disk() {
    for c in curves() {
        let r0 = 1e-2;
        let p = build_probe_domain(&c, 0.4, r0, 8).unwrap();
        let half = core::f64::consts::PI * r0 * r0 / 2.0;
        assert!((p.area() / half - 1.0).abs() < 0.02, "{}", p.area() / half);
    }
}

#[test]
fn probe_nodes_are_inside_both_regions() {
    for c in curves() {
        let tester = InsideTester::new(&c);
        let p = build_probe_domain(&c, 1.0, 0.04, 8).unwrap();
        for (x, w) in p.quadrature.nodes.iter().zip(&p.quadrature.weights) {
            assert!(*w > 0.0);
            assert!((*x - p.anchor).norm() < p.radius);
            assert_eq!(tester.classify(*x), Containment::Inside);
        }
    }
}

#[test]
fn probe_area_matches_monte_carlo() {
    use rand::{Rng, SeedableRng};
    let c = ParamCurve::kite();
    let p = build_probe_domain(&c, 0.0, 0.04, 16).unwrap();
    let tester = InsideTester::new(&c);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let samples = 16_000_000;
    let mut hits = 0usize;
    for _ in 0..samples {
        let d = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * p.radius;
        if d.norm() < p.radius && tester.is_inside(p.anchor + d) {
            hits += 1;
        }
    }
    let mc = 4.0 * p.radius * p.radius * hits as f64 / samples as f64;
    // 10⁻³ is about three standard errors of the hit-or-miss estimate.
    assert!((p.area() - mc).abs() < 1e-3 * mc, "{} vs {mc}", p.area());
}

#[test]
fn probe_radius_is_limited_by_curvature() {
    let c = ParamCurve::unit_circle();
    assert!(build_probe_domain(&c, 0.0, 0.6, 8).is_err());
    assert!(build_probe_domain(&c, 0.0, 0.4, 8).is_ok());
}

proptest! {
    #[test]
    fn normals_are_unit_and_orthogonal(t in 0.0..TAU, which in 0usize..3) {
        let c = &curves()[which];
        let p = c.eval(t);
        let nu = p.normal();
        prop_assert!((nu.norm() - 1.0).abs() < 1e-12);
        prop_assert!(nu.dot(p.dx).abs() < 1e-12 * p.dx.norm());
        prop_assert!(p.jacobian() > 0.0);
    }

    #[test]
    fn parameterization_is_periodic(t in 0.0..TAU, which in 0usize..3) {
        let c = &curves()[which];
        prop_assert!((c.point(t) - c.point(t + TAU)).norm() < 1e-12);
    }
}
