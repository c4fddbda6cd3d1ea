//! Command dispatch.

use std::path::{Path, PathBuf};

use penscat_core::geometry::{BoundaryGrid, Containment, InsideTester, ParamCurve};
use penscat_core::itp::{
    corollary21_condition, itp_solve, mitp_solve, smallest_te, sweep_spec, te_roots, ItpDiskSpec,
};
use penscat_core::math::{cis, Vec2, PI, TAU};
use penscat_core::special::IncidentField;
use penscat_core::transmission::{
    bie::BieOptions, bie_solve, farfield, ls_solve, sov_solve, two_step_variable_n, BieSystem, FarField,
    FieldSolution, IndexProfile, LsOptions, MediumSpec, SovOptions,
};
use penscat_core::uniqueness::{
    boundedness_study_lambda_eq1, boundedness_study_lambda_neq1, make_source_sequence, BieStudyOptions,
    LsStudyOptions, StudyReport, STUDY_HEADER,
};

use crate::config::{dense_coefficients, Command, RunConfig, Solver};
use crate::error::CliError;
use crate::output::{write_artifacts, Artifacts, Cell, Check, Table};

/// Runs the configured command and writes its artifacts into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let art = match cfg.command {
        Command::Forward => forward(cfg)?,
        Command::Farfield => far_field(cfg)?,
        Command::ItpEig => itp_eig(cfg)?,
        Command::ItpSolve => itp_solve_sweep(cfg)?,
        Command::Mitp => mitp(cfg)?,
        Command::Blowup => blowup(cfg)?,
        Command::Verify => verify(cfg)?,
    };
    let files = write_artifacts(out_dir, &cfg.echo(), &art)?;
    if cfg.command == Command::Verify && !art.all_pass() {
        let failed: Vec<&str> = art.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        return Err(CliError::Accuracy(format!("verify: {} failed", failed.join(", "))));
    }
    Ok(files)
}

fn circle_radius(cfg: &RunConfig) -> f64 {
    cfg.geometry.params()[0]
}

fn solve(cfg: &RunConfig, medium: &MediumSpec, incident: &IncidentField) -> Result<FieldSolution, CliError> {
    let curve = cfg.curve()?;
    let d = &cfg.discretization;
    let sov = SovOptions { cutoff: d.modes, degree: d.degree, ..SovOptions::default() };
    let sol = match d.solver {
        Solver::Bie => bie_solve(&BoundaryGrid::new(&curve, d.nodes)?, medium, incident)?,
        Solver::Ls => ls_solve(&curve, medium, incident, LsOptions { grid: d.grid, ..LsOptions::default() })?,
        Solver::Sov => sov_solve(circle_radius(cfg), medium, incident, sov)?,
        Solver::TwoStep => two_step_variable_n(circle_radius(cfg), medium, incident, sov)?,
    };
    Ok(sol)
}

fn record_solution(art: &mut Artifacts, sol: &FieldSolution) {
    let d = &sol.diagnostics;
    art.diag("solver", format!("{:?}", sol.tag));
    art.diag("residual", format!("{:e}", d.residual));
    if let Some(c) = d.condition {
        art.diag("condition", format!("{c:e}"));
    }
    if let Some(t) = d.truncation_tail {
        art.diag("truncation_tail", format!("{t:e}"));
    }
    if let Some(i) = d.iterations {
        art.diag("iterations", i);
    }
    for w in &d.warnings {
        art.diag("warning", w);
    }
}

fn forward(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let medium = cfg.medium_spec()?;
    let sol = solve(cfg, &medium, &cfg.incident_field())?;
    let points: Vec<Vec2> = match &cfg.experiment.points {
        Some(p) => p.iter().map(|q| Vec2::new(q[0], q[1])).collect(),
        None => {
            let (lo, hi) = cfg.curve()?.bounding_box();
            let r = 1.5 * lo.norm().max(hi.norm());
            (0..16).map(|i| Vec2::polar(r, TAU * i as f64 / 16.0)).collect()
        }
    };
    let mut art = Artifacts::default();
    record_solution(&mut art, &sol);
    let mut t = Table::new("field", &["x", "y", "region", "Re", "Im"]);
    for (x, v) in points.iter().zip(sol.eval_points(&points)) {
        let v = v?;
        let region = match v.region {
            Containment::Inside => "inside",
            Containment::Outside => "outside",
            Containment::NearBoundary => "boundary",
        };
        t.push(vec![x.x.into(), x.y.into(), region.into(), v.value.re.into(), v.value.im.into()]);
    }
    art.tables.push(t);
    Ok(art)
}

fn far_field_table(ff: &FarField) -> Table {
    let mut t = Table::new("farfield", &["angle", "Re", "Im"]);
    for [a, re, im] in ff.rows() {
        t.push(vec![a.into(), re.into(), im.into()]);
    }
    t
}

fn far_field(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let medium = cfg.medium_spec()?;
    let sol = solve(cfg, &medium, &cfg.incident_field())?;
    let ff = farfield(&sol, cfg.discretization.angles)?;
    let mut art = Artifacts::default();
    record_solution(&mut art, &sol);
    art.diag("far_field_max_abs", format!("{:e}", ff.max_abs()));
    art.checks.push(Check::holds("far field finite", ff.rows().iter().flatten().all(|v| v.is_finite())));
    art.tables.push(far_field_table(&ff));
    Ok(art)
}

fn itp_eig(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let n = cfg.medium.n;
    let it = &cfg.itp;
    let mut t = Table::new("eigenvalues", &["R", "mode", "k1"]);
    let mut scaled = Vec::new();
    for &r in &it.radii {
        let root = smallest_te(r, n, cfg.discretization.modes, 0.0, it.window / r)?;
        t.push(vec![r.into(), root.mode.into(), root.k.into()]);
        scaled.push(root.k * r);
    }
    let mut art = Artifacts::default();
    let first = scaled[0];
    let spread = scaled.iter().map(|v| (v - first).abs() / first).fold(0.0, f64::max);
    art.checks.push(Check::below("k1·R constant", spread, 1e-10));
    art.tables.push(t);
    Ok(art)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn itp_solve_sweep(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let (n, mm) = (cfg.medium.n, cfg.discretization.modes);
    let it = &cfg.itp;
    let f1 = dense_coefficients(&it.f1, mm);
    let f2 = dense_coefficients(&it.f2, mm);
    let mut t = Table::new(
        "itp",
        &[
            "R",
            "case",
            "k",
            "satisfied",
            "margin",
            "sign_changes",
            "stability_ratio",
            "max_condition",
            "trace_residual",
        ],
    );
    let mut art = Artifacts::default();
    let (mut given, mut near) = (Vec::new(), Vec::new());
    let mut implication = true;
    let mut worst_trace: f64 = 0.0;
    for &r in &it.radii {
        let mut cases = vec![("given", cfg.medium.k)];
        if !it.eigen_offsets.is_empty() {
            let k1 = smallest_te(r, n, mm, 0.0, it.window / r)?.k;
            cases.extend(it.eigen_offsets.iter().map(|o| ("near_eigenvalue", k1 + o)));
        }
        for (case, k) in cases {
            let cond = corollary21_condition(r, n, k)?;
            let mut changes = 0;
            for m in 0..=mm as i64 {
                changes += te_roots(r, n, m, 0.0, k)?.len();
            }
            if cond.satisfied && changes > 0 {
                implication = false;
            }
            let sol = itp_solve(&ItpDiskSpec { radius: r, n, k, cutoff: mm, f1: f1.clone(), f2: f2.clone() })?;
            let max_cond = sol.conditions.iter().copied().fold(0.0, f64::max);
            worst_trace = worst_trace.max(sol.trace_residual);
            if case == "given" {
                if cond.satisfied {
                    given.push(sol.stability_ratio);
                }
            } else {
                near.push(sol.stability_ratio);
            }
            t.push(vec![
                r.into(),
                case.into(),
                k.into(),
                cond.satisfied.into(),
                cond.margin.into(),
                changes.into(),
                sol.stability_ratio.into(),
                max_cond.into(),
                sol.trace_residual.into(),
            ]);
        }
    }
    art.checks.push(Check::below("trace residual", worst_trace, 1e-10));
    art.checks.push(Check::holds("condition implies no sign change in (0, k]", implication));
    let med = median(given.clone());
    if !given.is_empty() {
        let worst = given.iter().fold(0.0f64, |a, v| a.max(v / med));
        art.checks.push(Check::below("stability ratio / median while condition holds", worst, 10.0));
    }
    if !near.is_empty() && med > 0.0 {
        let least = near.iter().fold(f64::INFINITY, |a, v| a.min(v / med));
        art.checks.push(Check::above("stability ratio / median near an eigenvalue", least, 1e3));
    }
    art.tables.push(t);
    Ok(art)
}

fn mitp(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let mp = &cfg.mitp;
    let mut t = Table::new("mitp", &["lambda", "u_H1", "v_H1", "stability_ratio"]);
    let mut ratios = Vec::new();
    for &l in &mp.lambdas {
        let sol = mitp_solve(&sweep_spec(mp.radius, l, mp.modes, mp.intervals))?;
        t.push(vec![l.into(), sol.u_h1.into(), sol.v_h1.into(), sol.stability_ratio.into()]);
        ratios.push(sol.stability_ratio);
    }
    let mut art = Artifacts::default();
    if ratios.len() >= 2 {
        art.checks.push(Check::holds("stability ratio increases", ratios.windows(2).all(|w| w[1] > w[0])));
        art.checks.push(Check::above("growth first to last", ratios[ratios.len() - 1] / ratios[0], 1e2));
    }
    art.tables.push(t);
    Ok(art)
}

fn study_tables(rep: &StudyReport) -> (Table, Table) {
    let mut rows = Table::new("study", &STUDY_HEADER);
    for r in &rep.rows {
        let v = r.values();
        let mut cells: Vec<Cell> = vec![r.j.into()];
        cells.extend(v[1..].iter().map(|x| Cell::from(*x)));
        rows.push(cells);
    }
    let mut fits = Table::new("fits", &["name", "slope", "intercept", "residual", "slope_ci"]);
    for f in &rep.fits {
        fits.push(vec![
            f.name.as_str().into(),
            f.fit.slope.into(),
            f.fit.intercept.into(),
            f.fit.residual.into(),
            f.fit.slope_ci.into(),
        ]);
    }
    (rows, fits)
}

fn blowup(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let curve = cfg.curve()?;
    let medium = cfg.medium_spec()?;
    let e = &cfg.experiment;
    let seq = make_source_sequence(&curve, e.anchor, e.delta, e.count, cfg.source_kind())?;
    let mut art = Artifacts::default();
    let slope = |rep: &StudyReport, name: &str| rep.fit(name).map_or(f64::NAN, |f| f.slope);
    let rep = if medium.lambda != 1.0 {
        let opts = BieStudyOptions {
            n: cfg.discretization.nodes,
            alpha: e.grading,
            probe_radius: e.probe_radius,
            probe_resolution: e.probe_resolution,
        };
        let rep = boundedness_study_lambda_neq1(&curve, &medium, &seq, opts)?;
        art.checks.push(Check::within("sol_L2_D slope", slope(&rep, "sol_L2_D"), -0.05, 0.05));
        art.checks.push(Check::within("sol_H1_D slope", slope(&rep, "sol_H1_D"), -0.05, 0.05));
        art.checks.push(Check::holds("incident H1(D0) strictly increasing", rep.incident_monotone));
        rep
    } else {
        let opts = LsStudyOptions {
            ls: LsOptions { grid: cfg.discretization.grid, ..LsOptions::default() },
            probe_radius: e.probe_radius,
            probe_resolution: e.probe_resolution,
            ..LsStudyOptions::default()
        };
        let rep = boundedness_study_lambda_eq1(&curve, &medium, &seq, e.p, opts)?;
        art.checks.push(Check::below("ratio max/min", rep.spread(|r| r.ratio), 3.0));
        art.checks.push(Check::within("sol_H1_D0 slope", slope(&rep, "sol_H1_D0"), -0.1, 0.1));
        art.checks.push(Check::within("inc_L2_D0 slope", slope(&rep, "inc_L2_D0"), 0.9, 1.1));
        art.checks.push(Check::above("inc_Lp_D slope", slope(&rep, "inc_Lp_D"), 0.0));
        rep
    };
    for note in &rep.notes {
        art.diag("note", note);
    }
    let (rows, fits) = study_tables(&rep);
    art.tables.push(rows);
    art.tables.push(fits);
    Ok(art)
}

/// `∫|u∞|² / (−Re(e^{iπ/4} u∞(d)))`, equal to `√(8π/k)` for every lossless scatterer.
fn optical_ratio(ff: &FarField, d: f64) -> f64 {
    ff.energy() / -(cis(PI / 4.0) * ff.eval(d)).re
}

fn verify(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let k = cfg.medium.k;
    let angles = cfg.discretization.angles;
    let nodes = cfg.discretization.nodes;
    let sov_opts = SovOptions { cutoff: cfg.discretization.modes, ..SovOptions::default() };
    let circle = ParamCurve::unit_circle();
    let kite = ParamCurve::kite();
    let inc = IncidentField::plane_wave(0.3);
    let medium = |lambda: f64, n: IndexProfile| MediumSpec::new(k, lambda, n);
    let far = |sol: FieldSolution| farfield(&sol, angles);
    let mut art = Artifacts::default();

    for lambda in [1.0, 0.5] {
        let m = medium(lambda, IndexProfile::constant(2.0))?;
        let sov = far(sov_solve(1.0, &m, &inc, sov_opts)?)?;
        let bie = far(bie_solve(&BoundaryGrid::new(&circle, nodes)?, &m, &inc)?)?;
        art.checks.push(Check::below(&format!("BIE vs SOV, lambda = {lambda}"), bie.rel_l2(&sov)?, 1e-8));
    }
    let m = medium(1.0, IndexProfile::constant(2.0))?;
    let sov = far(sov_solve(1.0, &m, &inc, sov_opts)?)?;
    let mut ls_err = Vec::new();
    for grid in [64, 128] {
        let ls = far(ls_solve(&circle, &m, &inc, LsOptions { grid, ..LsOptions::default() })?)?;
        ls_err.push(ls.rel_l2(&sov)?);
    }
    art.checks.push(Check::below("LS vs SOV, grid 64", ls_err[0], 1e-3));
    art.checks.push(Check::above("LS error reduction 64 -> 128", ls_err[0] / ls_err[1], 3.5));

    let clear = medium(1.0, IndexProfile::constant(1.0))?;
    for (name, curve) in [("circle", &circle), ("kite", &kite)] {
        let bie = far(bie_solve(&BoundaryGrid::new(curve, nodes)?, &clear, &inc)?)?;
        let ls = far(ls_solve(curve, &clear, &inc, LsOptions::default())?)?;
        art.checks.push(Check::below(&format!("invisibility BIE, {name}"), bie.max_abs(), 1e-10));
        art.checks.push(Check::below(&format!("invisibility LS, {name}"), ls.max_abs(), 1e-10));
    }

    // Reciprocity u∞(x̂; d) = u∞(−d; −x̂) on an 8 × 8 direction grid.
    let dirs: Vec<f64> = (0..8).map(|i| TAU * i as f64 / 8.0).collect();
    let sys = BieSystem::new(&BoundaryGrid::new(&kite, nodes)?, &m, BieOptions::default())?;
    let tester = InsideTester::new(&kite);
    let fields = dirs
        .iter()
        .map(|&a| far(sys.solve_incident(&IncidentField::plane_wave(a), &tester)?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst: f64 = 0.0;
    for (i, &d) in dirs.iter().enumerate() {
        for (jx, &x) in dirs.iter().enumerate() {
            let opposite = (jx + 4) % 8;
            worst = worst.max((fields[i].eval(x) - fields[opposite].eval(d + PI)).norm());
        }
    }
    art.checks.push(Check::below("reciprocity, kite", worst, 1e-6));

    let kappa = optical_ratio(&sov, 0.3);
    art.diag("optical_constant", format!("{kappa:e}"));
    let worst = dirs
        .iter()
        .zip(&fields)
        .map(|(&d, ff)| (optical_ratio(ff, d) - kappa).abs() / kappa)
        .fold(0.0, f64::max);
    art.checks.push(Check::below("optical theorem, kite", worst, 1e-6));

    let radial = medium(0.5, IndexProfile::radial(&[2.0, 0.0, -1.0]))?;
    let direct = far(sov_solve(1.0, &radial, &inc, sov_opts)?)?;
    let two = far(two_step_variable_n(1.0, &radial, &inc, sov_opts)?)?;
    art.checks.push(Check::below("two-step vs direct", two.rel_l2(&direct)?, 1e-8));

    let mut t = Table::new("checks", &["check", "value", "threshold", "pass"]);
    for c in &art.checks {
        t.push(vec![c.name.as_str().into(), c.value.into(), c.threshold.as_str().into(), c.pass.into()]);
    }
    art.tables.push(t);
    Ok(art)
}
