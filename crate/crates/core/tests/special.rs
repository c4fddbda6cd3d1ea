use penscat_core::math::{Vec2, C64, EULER_GAMMA, PI};
use penscat_core::special::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn trivial_values() {
    assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
    assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
    assert!(bessel_y(0, 0.0).is_err());
    assert!(hankel1(3, 0.0).is_err());
    assert!(bessel_k(0, 0.0).is_err());
    assert!(bessel_j(61, 1.0).is_err());
}

#[test]
fn bessel_values_match_mpmath() {
    // (m, x, J_m(x), Y_m(x)) from mpmath at 30 digits.
    let table = [
        (0, 0.5, 0.9384698072408129, -0.44451873350670656),
        (1, 2.0, 0.5767248077568734, -0.10703243154093754),
        (5, 3.7, 0.09948541700833391, -0.979065068233542),
        (20, 10.0, 1.1513369247813398e-05, -1597.483848269626),
        (40, 25.0, 1.6745774155622661e-06, -6091.2102591779885),
        (3, 60.0, -0.04039671152165516, -0.09482271816300826),
    ];
    for (m, x, j, y) in table {
        let (jj, yy) = (bessel_j(m, x).unwrap(), bessel_y(m, x).unwrap());
        assert!(rel(jj, j) < 1e-12, "J_{m}({x}) = {jj} vs {j}");
        assert!(rel(yy, y) < 1e-12, "Y_{m}({x}) = {yy} vs {y}");
        let h = hankel1(m, x).unwrap();
        assert_eq!(h, C64::new(jj, yy));
    }
}

#[test]
fn modified_bessel_values_match_mpmath() {
    let table = [
        (0, 0.5, 1.0634833707413236, 0.9244190712276659),
        (1, 2.0, 1.590636854637329, 0.13986588181652243),
        (10, 3.0, 1.946439347061297e-05, 2459.6204220569466),
        (30, 20.0, 0.08213246249732563, 0.16883087719470802),
    ];
    for (m, x, i, k) in table {
        assert!(rel(bessel_i(m, x).unwrap(), i) < 1e-10, "I_{m}({x})");
        assert!(rel(bessel_k(m, x).unwrap(), k) < 1e-10, "K_{m}({x})");
    }
}

#[test]
fn first_zero_of_j0() {
    assert!((first_zero_j0() - 2.404825557695773).abs() < 1e-12);
}

#[test]
fn modified_wronskian() {
    let (m, x) = (3, 2.0);
    let i = |n| bessel_i(n, x).unwrap();
    let k = |n| bessel_k(n, x).unwrap();
    let di = i(m - 1) - m as f64 / x * i(m);
    let dk = -k(m - 1) - m as f64 / x * k(m);
    let w = i(m) * dk - di * k(m);
    assert!((w + 1.0 / x).abs() < 1e-10);
}

#[test]
fn cylinder_wronskian_on_log_grid() {
    for e in 0..=40 {
        let x = 10f64.powf(-1.0 + 4.0 * e as f64 / 40.0);
        let (j, dj) = bessel_j_with_derivative(40, x);
        let (h, dh) = hankel1_with_derivative(40, x);
        for m in 0..=40 {
            if !h[m].im.is_finite() {
                continue;
            }
            let w = j[m] * dh[m].im - dj[m] * h[m].im;
            let expect = 2.0 / (PI * x);
            assert!(rel(w, expect) < 1e-10, "m={m} x={x}: {w} vs {expect}");
        }
    }
}

#[test]
fn hankel_recurrence() {
    for x in [0.3, 1.0, 4.5, 17.0, 120.0] {
        for m in 1..40 {
            let (a, b, c) = (hankel1(m - 1, x).unwrap(), hankel1(m, x).unwrap(), hankel1(m + 1, x).unwrap());
            let lhs = a + c;
            let rhs = b * (2.0 * m as f64 / x);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "m={m} x={x}");
        }
    }
}

#[test]
fn fundamental_solution_properties() {
    let (k, y) = (2.0, Vec2::new(0.3, -0.2));
    let x = y + Vec2::polar(1.0, 0.7);
    let h = 1e-4;
    let p = |p: Vec2| phi(k, p, y).unwrap();
    let lap = (p(x + Vec2::new(h, 0.0)) + p(x - Vec2::new(h, 0.0)) + p(x + Vec2::new(0.0, h))
        + p(x - Vec2::new(0.0, h))
        - p(x) * 4.0)
        / (h * h);
    assert!((lap + p(x) * (k * k)).norm() < 1e-6);
    assert_eq!(phi(k, x, y).unwrap(), phi(k, y, x).unwrap());
    assert!(phi(k, x, x).is_err());

    let r = 1e-6;
    let near = phi(k, y + Vec2::new(r, 0.0), y).unwrap();
    let series = C64::new(-((k * r / 2.0).ln() + EULER_GAMMA) / (2.0 * PI), 0.25);
    assert!((near - series).norm() < 1e-6);
}

#[test]
fn gradient_properties() {
    let (k, y) = (3.0, Vec2::new(-0.1, 0.4));
    let x = y + Vec2::polar(0.7, 2.1);
    let g = grad_phi(k, x, y).unwrap();
    let h = 1e-5;
    let p = |p: Vec2| phi(k, p, y).unwrap();
    let gx = (p(x + Vec2::new(h, 0.0)) - p(x - Vec2::new(h, 0.0))) / (2.0 * h);
    let gy = (p(x + Vec2::new(0.0, h)) - p(x - Vec2::new(0.0, h))) / (2.0 * h);
    assert!((g.x - gx).norm() < 1e-6 && (g.y - gy).norm() < 1e-6);

    // ∇ₓΦ(x, y) = −∇ᵧΦ(x, y) = −∇ₓΦ(y, x) with the roles swapped.
    let swapped = grad_phi(k, y, x).unwrap();
    assert!((g.x + swapped.x).norm() < 1e-15 && (g.y + swapped.y).norm() < 1e-15);

    let r = 1e-4;
    let g = grad_phi(k, y + Vec2::new(r, 0.0), y).unwrap();
    let ratio = g.norm_sqr().sqrt() * 2.0 * PI * r;
    assert!((ratio - 1.0).abs() < 0.01);
}

#[test]
fn incident_examples() {
    let k = 1.7;
    let pw = IncidentField::PlaneWave { d: Vec2::new(1.0, 0.0) };
    let (u, g) = pw.eval(k, Vec2::new(0.0, 0.0)).unwrap();
    assert_eq!(u, C64::new(1.0, 0.0));
    assert!((g.x - C64::new(0.0, k)).norm() < 1e-15 && g.y.norm() < 1e-15);

    let z = Vec2::new(2.0, 1.0);
    let x = Vec2::new(-0.3, 0.5);
    let ps = IncidentField::PointSource { z };
    assert_eq!(ps.value(k, x).unwrap(), phi(k, x, z).unwrap());
    assert!(ps.eval(k, z).is_err());

    let a = Vec2::polar(1.0, 0.4);
    let dp = IncidentField::Dipole { z, a };
    let expect = grad_phi(k, x, z).unwrap().dot(a);
    assert!((dp.value(k, x).unwrap() - expect).norm() < 1e-15 * expect.norm().max(1.0));
}

fn fd_residual(f: &IncidentField, k: f64, x: Vec2) -> (f64, f64) {
    let h = 1e-3;
    let u = |p: Vec2| f.value(k, p).unwrap();
    let lap = (u(x + Vec2::new(h, 0.0)) + u(x - Vec2::new(h, 0.0)) + u(x + Vec2::new(0.0, h))
        + u(x - Vec2::new(0.0, h))
        - u(x) * 4.0)
        / (h * h);
    ((lap + u(x) * (k * k)).norm(), u(x).norm())
}

fn fd_gradient_error(f: &IncidentField, k: f64, x: Vec2) -> f64 {
    let h = 1e-6;
    let u = |p: Vec2| f.value(k, p).unwrap();
    let (_, g) = f.eval(k, x).unwrap();
    let gx = (u(x + Vec2::new(h, 0.0)) - u(x - Vec2::new(h, 0.0))) / (2.0 * h);
    let gy = (u(x + Vec2::new(0.0, h)) - u(x - Vec2::new(0.0, h))) / (2.0 * h);
    ((g.x - gx).norm() + (g.y - gy).norm()) / (1.0 + g.norm_sqr().sqrt())
}

#[test]
fn incident_fields_solve_helmholtz() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let z = Vec2::new(1.2, 0.0);
    let fields = [
        IncidentField::plane_wave(0.9),
        IncidentField::PointSource { z },
        IncidentField::Dipole { z, a: Vec2::polar(1.0, 2.0) },
    ];
    for f in &fields {
        let mut done = 0;
        while done < 100 {
            let x = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if (x - z).norm() < 0.5 {
                continue;
            }
            let (res, u) = fd_residual(f, 2.0, x);
            assert!(res < 1e-5 * (1.0 + u), "{f:?} at {x:?}: {res}");
            assert!(fd_gradient_error(f, 2.0, x) < 1e-6);
            done += 1;
        }
    }
}

proptest! {
    #[test]
    fn wronskian_holds_everywhere(m in 0usize..=40, x in 0.5f64..900.0) {
        let (j, dj) = bessel_j_with_derivative(m, x);
        let (h, dh) = hankel1_with_derivative(m, x);
        let w = j[m] * dh[m].im - dj[m] * h[m].im;
        prop_assert!(rel(w, 2.0 / (PI * x)) < 1e-10);
    }

    #[test]
    fn negative_orders_reflect(m in 1i32..=60, x in 0.1f64..100.0) {
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(bessel_j(-m, x).unwrap(), s * bessel_j(m, x).unwrap());
    }
}
