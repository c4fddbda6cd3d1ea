use penscat_core::geometry::{BoundaryGrid, ParamCurve};
use penscat_core::special::IncidentField;
use penscat_core::transmission::{
    bie_solve, farfield, ls_solve, sov_solve, two_step_variable_n, FarField, IndexProfile,
    LsOptions, MediumSpec, SovOptions,
};

const M: usize = 64;

fn sov_far(k: f64, lambda: f64, n: IndexProfile, inc: &IncidentField) -> FarField {
    let medium = MediumSpec::new(k, lambda, n).unwrap();
    let sol = sov_solve(1.0, &medium, inc, SovOptions::default()).unwrap();
    farfield(&sol, M).unwrap()
}

#[test]
fn bie_matches_separation_of_variables() {
    let inc = IncidentField::plane_wave(0.3);
    let circle = ParamCurve::unit_circle();
    for lambda in [1.0, 0.5] {
        let medium = MediumSpec::new(1.0, lambda, IndexProfile::constant(2.0)).unwrap();
        let grid = BoundaryGrid::new(&circle, 256).unwrap();
        let bie = farfield(&bie_solve(&grid, &medium, &inc).unwrap(), M).unwrap();
        let sov = sov_far(1.0, lambda, IndexProfile::constant(2.0), &inc);
        let err = bie.rel_l2(&sov).unwrap();
        println!("lambda {lambda}: bie-sov {err:.3e}");
        assert!(err < 1e-8, "{err}");
    }
}

#[test]
fn ls_matches_separation_of_variables_and_converges() {
    let inc = IncidentField::plane_wave(0.3);
    let circle = ParamCurve::unit_circle();
    let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(2.0)).unwrap();
    let sov = sov_far(1.0, 1.0, IndexProfile::constant(2.0), &inc);
    let mut errs = Vec::new();
    for grid in [64, 128] {
        let opts = LsOptions { grid, ..LsOptions::default() };
        let ls = farfield(&ls_solve(&circle, &medium, &inc, opts).unwrap(), M).unwrap();
        errs.push(ls.rel_l2(&sov).unwrap());
    }
    println!("ls errors {errs:?}, ratio {}", errs[0] / errs[1]);
    assert!(errs[0] < 1e-3);
    assert!(errs[0] / errs[1] >= 3.5);
}

#[test]
fn unit_index_is_invisible() {
    let inc = IncidentField::plane_wave(0.7);
    let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(1.0)).unwrap();
    for curve in [ParamCurve::unit_circle(), ParamCurve::kite()] {
        let grid = BoundaryGrid::new(&curve, 256).unwrap();
        let bie = farfield(&bie_solve(&grid, &medium, &inc).unwrap(), M).unwrap();
        let ls = farfield(&ls_solve(&curve, &medium, &inc, LsOptions::default()).unwrap(), M).unwrap();
        println!("invisible: bie {:.3e} ls {:.3e}", bie.max_abs(), ls.max_abs());
        assert!(bie.max_abs() < 1e-10);
        assert!(ls.max_abs() < 1e-10);
    }
}

#[test]
fn two_step_matches_direct_for_radial_index() {
    let inc = IncidentField::plane_wave(0.0);
    let n = IndexProfile::radial(&[2.0, 0.0, -1.0]);
    let medium = MediumSpec::new(1.0, 0.5, n.clone()).unwrap();
    let two = farfield(&two_step_variable_n(1.0, &medium, &inc, SovOptions::default()).unwrap(), M).unwrap();
    let direct = sov_far(1.0, 0.5, n, &inc);
    let err = two.rel_l2(&direct).unwrap();
    println!("two-step {err:.3e}");
    assert!(err < 1e-8);
}

use penscat_core::geometry::InsideTester;
use penscat_core::math::{cis, Vec2, C64, PI, TAU};
use penscat_core::transmission::{bie::BieOptions, BieSystem, SovSolver};
use penscat_core::uniqueness::{estimate_witness, make_source_sequence, SourceKind};

#[test]
fn separation_of_variables_matches_mie_series() {
    // u∞ at θ = 0, π/2, π from an mpmath Mie series (40 digits) for
    // R = 1, k = 1, n = 2, λ = 0.5, d = (1, 0).
    let expect = [
        (0.0, C64::new(0.26793426748370833, 0.38210623641646974)),
        (PI / 2.0, C64::new(0.019170640586155984, 0.029054928777688011)),
        (PI, C64::new(-0.099_628_701_548_695_3, -0.1860753448776327)),
    ];
    let ff = sov_far(1.0, 0.5, IndexProfile::constant(2.0), &IncidentField::plane_wave(0.0));
    for (th, u) in expect {
        assert!((ff.eval(th) - u).norm() < 1e-10, "{th}: {}", ff.eval(th));
    }
}

fn kite_bie(k: f64, n: f64, lambda: f64, angle: f64) -> FarField {
    let curve = ParamCurve::kite();
    let grid = BoundaryGrid::new(&curve, 256).unwrap();
    let medium = MediumSpec::new(k, lambda, IndexProfile::constant(n)).unwrap();
    farfield(&bie_solve(&grid, &medium, &IncidentField::plane_wave(angle)).unwrap(), M).unwrap()
}

#[test]
fn reciprocity_on_kite_and_circle() {
    let grid_angles: Vec<f64> = (0..8).map(|i| TAU * i as f64 / 8.0).collect();
    for curve in [ParamCurve::kite(), ParamCurve::unit_circle()] {
        let grid = BoundaryGrid::new(&curve, 256).unwrap();
        let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(2.0)).unwrap();
        let sys = BieSystem::new(&grid, &medium, BieOptions::default()).unwrap();
        let tester = InsideTester::new(&curve);
        let fields: Vec<FarField> = grid_angles
            .iter()
            .map(|&a| farfield(&sys.solve_incident(&IncidentField::plane_wave(a), &tester).unwrap(), M).unwrap())
            .collect();
        let mut worst = 0.0f64;
        for (i, &d) in grid_angles.iter().enumerate() {
            for &x in &grid_angles {
                // u∞(x̂; d) = u∞(−d; −x̂); −x̂ is again on the 8-direction grid.
                let j = ((x + PI) / (TAU / 8.0)).round() as usize % 8;
                let a = fields[i].eval(x);
                let b = fields[j].eval(d + PI);
                worst = worst.max((a - b).norm());
            }
        }
        assert!(worst < 1e-6, "{worst}");
    }
}

/// `∫|u∞|² / (−Re(e^{iπ/4} u∞(d)))`.
fn optical_ratio(ff: &FarField, d: f64) -> f64 {
    ff.energy() / -(cis(PI / 4.0) * ff.eval(d)).re
}

#[test]
fn optical_theorem() {
    let k = 1.0;
    let kappa = optical_ratio(&sov_far(k, 1.0, IndexProfile::constant(2.0), &IncidentField::plane_wave(0.0)), 0.0);
    assert!((kappa - (8.0 * PI / k).sqrt()).abs() < 1e-8 * kappa);
    for (angle, lambda) in [(0.0, 1.0), (1.1, 1.0), (2.0, 0.5)] {
        let ff = kite_bie(k, 2.0, lambda, angle);
        let r = optical_ratio(&ff, angle);
        assert!((r - kappa).abs() < 1e-6 * kappa, "{r} vs {kappa}");
    }
}

#[test]
fn absorbing_medium_dissipates() {
    let k = 1.0;
    let inc = IncidentField::plane_wave(0.0);
    let ff = sov_far(k, 1.0, IndexProfile::Constant(C64::new(2.0, 0.5)), &inc);
    let lossless = -(8.0 * PI / k).sqrt() * (cis(PI / 4.0) * ff.eval(0.0)).re;
    assert!(ff.energy() < lossless * (1.0 - 1e-3), "{} vs {lossless}", ff.energy());
}

#[test]
fn transmission_conditions_hold_across_the_boundary() {
    let curve = ParamCurve::kite();
    let grid = BoundaryGrid::new(&curve, 256).unwrap();
    let lambda = 0.5;
    let medium = MediumSpec::new(1.0, lambda, IndexProfile::constant(2.0)).unwrap();
    let sol = bie_solve(&grid, &medium, &IncidentField::plane_wave(0.4)).unwrap();
    for i in 0..32 {
        let t = TAU * (i as f64 + 0.5) / 32.0;
        let (x, nu) = (curve.point(t), curve.normal(t));
        // Cubic extrapolation of both one-sided traces.
        let trace = |side: f64| {
            let at = |e: f64| {
                let f = sol.total(x + nu * (side * e)).unwrap();
                (f.value, f.gradient.dot(nu))
            };
            let (a, b, c) = (at(5e-4), at(1e-3), at(1.5e-3));
            (a.0 * 3.0 - b.0 * 3.0 + c.0, a.1 * 3.0 - b.1 * 3.0 + c.1)
        };
        let (u, du) = trace(1.0);
        let (v, dv) = trace(-1.0);
        assert!((u - v).norm() < 1e-6, "t={t}: {}", (u - v).norm());
        assert!((du - dv * lambda).norm() < 1e-5, "t={t}: {}", (du - dv * lambda).norm());
    }
}

#[test]
fn bie_matches_ls_on_kite() {
    let curve = ParamCurve::kite();
    let inc = IncidentField::plane_wave(0.0);
    let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(2.0)).unwrap();
    let ls = farfield(&ls_solve(&curve, &medium, &inc, LsOptions { grid: 128, ..LsOptions::default() }).unwrap(), M).unwrap();
    let bie = kite_bie(1.0, 2.0, 1.0, 0.0);
    let err = ls.rel_l2(&bie).unwrap();
    assert!(err < 1e-3, "{err}");
}

#[test]
fn ls_matches_radial_oracle() {
    let n = IndexProfile::radial(&[2.0, 0.0, -1.0]);
    let inc = IncidentField::plane_wave(0.5);
    let medium = MediumSpec::new(1.0, 1.0, n.clone()).unwrap();
    let ls = farfield(&ls_solve(&ParamCurve::unit_circle(), &medium, &inc, LsOptions::default()).unwrap(), M).unwrap();
    let err = ls.rel_l2(&sov_far(1.0, 1.0, n, &inc)).unwrap();
    assert!(err < 1e-3, "{err}");
}

#[test]
fn ls_without_contrast_returns_the_incident_field() {
    let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(1.0)).unwrap();
    let inc = IncidentField::plane_wave(0.3);
    let sol = ls_solve(&ParamCurve::kite(), &medium, &inc, LsOptions::default()).unwrap();
    let x = Vec2::new(-0.2, 0.1);
    assert!((sol.total(x).unwrap().value - inc.value(1.0, x).unwrap()).norm() < 1e-14);
}

#[test]
fn constant_index_modes_are_bessel_functions() {
    let medium = MediumSpec::new(1.0, 0.5, IndexProfile::constant(2.0)).unwrap();
    let solver = SovSolver::new(1.0, &medium, SovOptions::default()).unwrap();
    let sol = solver.solve(&IncidentField::plane_wave(0.0)).unwrap();
    let k1 = 2f64.sqrt();
    // w₂ is a sum of J_m(k₁r) modes whose boundary values fix the coefficients.
    let bv = sol.interior_boundary_values();
    let cutoff = sol.cutoff() as i64;
    let (jr, _) = penscat_core::special::bessel_j_with_derivative(cutoff as usize, k1);
    for x in [Vec2::new(0.3, -0.2), Vec2::new(-0.6, 0.5), Vec2::new(0.0, 0.0)] {
        let (r, th) = (x.norm(), x.angle());
        let (jx, _) = penscat_core::special::bessel_j_with_derivative(cutoff as usize, k1 * r);
        let mut expect = C64::new(0.0, 0.0);
        for m in -cutoff..=cutoff {
            let a = m.unsigned_abs() as usize;
            expect += bv[(m + cutoff) as usize].0 * (jx[a] / jr[a]) * cis(m as f64 * th);
        }
        let got = sol.w2(x).unwrap().0;
        assert!((got - expect).norm() < 1e-10, "{x:?}: {}", (got - expect).norm());
    }
}

#[test]
fn sov_without_contrast_does_not_scatter() {
    let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(1.0)).unwrap();
    let sol = SovSolver::new(1.0, &medium, SovOptions::default()).unwrap().solve(&IncidentField::plane_wave(0.2)).unwrap();
    let worst = sol.exterior_coefficients().iter().map(|a| a.norm()).fold(0.0, f64::max);
    // The Chebyshev radial solve reproduces J_m to about 10⁻¹².
    assert!(worst < 1e-11, "{worst}");
}

#[test]
fn modal_energy_matches_quadrature() {
    let medium = MediumSpec::new(1.0, 1.0, IndexProfile::constant(4.0)).unwrap();
    let sol = SovSolver::new(1.0, &medium, SovOptions::default()).unwrap().solve(&IncidentField::plane_wave(0.0)).unwrap();
    let ff = FarField::new(sol.far_field_samples(M), 1.0, None).unwrap();
    assert!((ff.energy() - sol.modal_energy()).abs() < 1e-10 * sol.modal_energy());
}

#[test]
fn two_step_with_constant_index_has_no_correction() {
    use penscat_core::transmission::two_step_modes;
    let medium = MediumSpec::new(1.0, 0.5, IndexProfile::constant(2.0)).unwrap();
    let solver = SovSolver::new(1.0, &medium, SovOptions::default()).unwrap();
    let (f1, f2) = solver.scattering_data(&IncidentField::plane_wave(0.0)).unwrap();
    let (total, step1, step2) = two_step_modes(1.0, &medium, &f1, &f2, SovOptions::default()).unwrap();
    assert!(step2.exterior_coefficients().iter().all(|a| a.norm() == 0.0));
    assert_eq!(total.exterior_coefficients(), step1.exterior_coefficients());
}

#[test]
fn distant_point_source_looks_like_a_plane_wave() {
    let medium = MediumSpec::new(1.0, 0.5, IndexProfile::constant(2.0)).unwrap();
    let z = Vec2::polar(1000.0, 0.7);
    let ps = farfield(&sov_solve(1.0, &medium, &IncidentField::PointSource { z }, SovOptions::default()).unwrap(), M).unwrap();
    let pw = sov_far(1.0, 0.5, IndexProfile::constant(2.0), &IncidentField::plane_wave(0.7 + PI));
    let a: Vec<C64> = ps.angles().iter().map(|&t| ps.eval(t)).collect();
    let b: Vec<C64> = pw.angles().iter().map(|&t| pw.eval(t)).collect();
    let dot: C64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
    let na = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    assert!(dot.norm() / (na * nb) > 0.999);
}

#[test]
fn estimate_constant_is_stable_along_the_sequence() {
    let n = IndexProfile::radial(&[2.0, 0.0, -1.0]);
    let medium = MediumSpec::new(1.0, 0.5, n).unwrap();
    let seq = make_source_sequence(&ParamCurve::unit_circle(), 0.0, 1.5, 4, SourceKind::Monopole).unwrap();
    let opts = SovOptions { cutoff: 40, tail_tol: 1e-6, ..SovOptions::default() };
    let rows = estimate_witness(1.0, &medium, &seq, opts).unwrap();
    let mean = rows.iter().map(|r| r.constant).sum::<f64>() / rows.len() as f64;
    for r in &rows {
        assert!((r.constant / mean - 1.0).abs() < 0.2, "{rows:?}");
    }
}

#[test]
fn solver_preconditions() {
    let curve = ParamCurve::unit_circle();
    let grid = BoundaryGrid::new(&curve, 64).unwrap();
    let radial = MediumSpec::new(1.0, 0.5, IndexProfile::radial(&[2.0, 0.0, -1.0])).unwrap();
    assert!(bie_solve(&grid, &radial, &IncidentField::plane_wave(0.0)).is_err());
    let jump = MediumSpec::new(1.0, 0.5, IndexProfile::constant(2.0)).unwrap();
    assert!(ls_solve(&curve, &jump, &IncidentField::plane_wave(0.0), LsOptions::default()).is_err());
    assert!(MediumSpec::new(1.0, -1.0, IndexProfile::constant(2.0)).is_err());
    assert!(MediumSpec::new(1.0, 1.0, IndexProfile::constant(-2.0)).is_err());
    assert!(MediumSpec::new(1.0, 1.0, IndexProfile::Constant(C64::new(2.0, -0.1))).is_err());
    let inside = IncidentField::PointSource { z: Vec2::new(0.2, 0.0) };
    assert!(bie_solve(&grid, &jump, &inside).is_err());
    let strict = LsOptions { grid: 16, strict: true, ..LsOptions::default() };
    let dense = MediumSpec::new(6.0, 1.0, IndexProfile::constant(4.0)).unwrap();
    assert!(ls_solve(&curve, &dense, &IncidentField::plane_wave(0.0), strict).is_err());
}
