//! Point sources approaching the boundary.
//!
//! Along `z_j = z* + (δ/j) ν(z*)` the incident fields blow up in norm on a
//! probe domain `D₀` touching `z*`, while the interior fields of the
//! transmission problem stay bounded. The studies here measure both sides
//! and fit log-log growth rates in `j`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{
    anchored_domain_quadrature, BoundaryGrid, Containment, InsideTester, ParamCurve, ProbeDomain,
    VolumeQuadrature,
};
use crate::layer::{assemble_k, assemble_s, TrigInterp};
use crate::linalg::Lu;
use crate::math::{Vec2, C64, TAU};
use crate::special::{bessel_j_with_derivative, hankel1_with_derivative, IncidentField};
use crate::transmission::sov::{two_step_modes, SovOptions};
use crate::transmission::{BieOptions, BieSystem, LsOperator, LsOptions, MediumSpec};

/// Monopole `Φ(·, z_j)` or dipole `∇Φ(·, z_j)·ν(z*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Monopole,
    Dipole,
}

/// Exterior points `z_j = z* + (δ/j) ν(z*)`, `j = 1..=J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSequence {
    pub anchor_param: f64,
    pub anchor: Vec2,
    pub normal: Vec2,
    pub delta: f64,
    pub count: usize,
    pub kind: SourceKind,
    pub points: Vec<Vec2>,
}

/// Builds and validates a source sequence; every `z_j` must lie outside `D̄`.
pub fn make_source_sequence(
    curve: &ParamCurve,
    anchor_param: f64,
    delta: f64,
    count: usize,
    kind: SourceKind,
) -> Result<SourceSequence> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("offset δ must be finite and > 0"));
    }
    if count < 4 {
        return Err(Error::invalid("a source sequence needs J ≥ 4 members"));
    }
    let c = curve.eval(anchor_param);
    let anchor = c.x;
    let normal = c.normal();
    let tester = InsideTester::new(curve);
    let points: Vec<Vec2> = (1..=count).map(|j| anchor + normal * (delta / j as f64)).collect();
    for (i, z) in points.iter().enumerate() {
        if tester.classify(*z) != Containment::Outside {
            return Err(Error::invalid(alloc::format!(
                "z_{} = ({:.6}, {:.6}) is not outside D; δ is too large for the curvature at z*",
                i + 1,
                z.x,
                z.y
            )));
        }
    }
    Ok(SourceSequence { anchor_param, anchor, normal, delta, count, kind, points })
}

impl SourceSequence {
    /// Incident field of member `j` (1-based).
    pub fn incident(&self, j: usize) -> IncidentField {
        let z = self.points[j - 1];
        match self.kind {
            SourceKind::Monopole => IncidentField::PointSource { z },
            SourceKind::Dipole => IncidentField::Dipole { z, a: self.normal },
        }
    }

    /// `δ/j`.
    pub fn distance(&self, j: usize) -> f64 {
        self.delta / j as f64
    }

    /// Interior image point `y_j = z* − (δ/j) ν(z*)`.
    pub fn image(&self, j: usize) -> Vec2 {
        self.anchor - self.normal * self.distance(j)
    }
}

/// `L²` and `H¹` norms of one field on the probe domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentNorms {
    pub j: usize,
    pub dist: f64,
    pub l2: f64,
    pub h1: f64,
}

fn field_norms(q: &VolumeQuadrature, f: impl Fn(Vec2) -> Result<(C64, crate::math::CVec2)>) -> Result<(f64, f64)> {
    let mut l2 = 0.0;
    let mut g2 = 0.0;
    for (x, w) in q.nodes.iter().zip(&q.weights) {
        let (u, g) = f(*x)?;
        l2 += w * u.norm_sqr();
        g2 += w * g.norm_sqr();
    }
    Ok((l2.sqrt(), (l2 + g2).sqrt()))
}

/// Incident-field norms on the probe domain for every member of the sequence.
pub fn incident_norms(seq: &SourceSequence, probe: &ProbeDomain, k: f64) -> Result<Vec<IncidentNorms>> {
    let res = crate::par::map(seq.count, |i| {
        let j = i + 1;
        let inc = seq.incident(j);
        field_norms(&probe.quadrature, |x| inc.eval(k, x))
            .map(|(l2, h1)| IncidentNorms { j, dist: seq.distance(j), l2, h1 })
            .map_err(|e| e.at(j))
    });
    res.into_iter().collect()
}

/// [`incident_norms`] with the probe quadrature refined until every norm
/// changes by less than `rel_tol` under doubling, starting at `resolution`.
pub fn incident_norms_refined(
    seq: &SourceSequence,
    curve: &ParamCurve,
    probe_radius: f64,
    resolution: usize,
    k: f64,
    rel_tol: f64,
) -> Result<(Vec<IncidentNorms>, ProbeDomain)> {
    let mut res = resolution.max(2);
    let mut probe = crate::geometry::build_probe_domain(curve, seq.anchor_param, probe_radius, res)?;
    let mut prev = incident_norms(seq, &probe, k)?;
    for _ in 0..4 {
        res *= 2;
        let finer = crate::geometry::build_probe_domain(curve, seq.anchor_param, probe_radius, res)?;
        let next = incident_norms(seq, &finer, k)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| ((a.l2 - b.l2).abs() / b.l2).max((a.h1 - b.h1).abs() / b.h1))
            .fold(0.0, f64::max);
        probe = finer;
        prev = next;
        if change < rel_tol {
            return Ok((prev, probe));
        }
    }
    Err(Error::Accuracy(alloc::format!(
        "probe quadrature did not reach {rel_tol:.0e} relative agreement at resolution {res}"
    )))
}

/// Least-squares fit of `ln(norm)` against `ln(j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Half width of the 95% confidence interval of the slope.
    pub slope_ci: f64,
}

/// Two-sided 97.5% Student-t quantiles for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

/// Fits `ln(norm) = slope · ln(j) + intercept` over rows `(j, norm)`.
pub fn fit_growth_rate(rows: &[(f64, f64)]) -> Result<GrowthFit> {
    if rows.len() < 3 {
        return Err(Error::invalid("a growth fit needs at least 3 rows"));
    }
    if rows.iter().any(|(j, v)| !(*j > 0.0 && *v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("growth fits need positive indices and positive finite norms"));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("growth fits need at least two distinct indices"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let residual = (ss / n).sqrt();
    let dof = rows.len() - 2;
    let se = (ss / dof as f64 / sxx).sqrt();
    let t = if dof <= 30 { T975[dof - 1] } else { 1.96 };
    Ok(GrowthFit { slope, intercept, residual, slope_ci: t * se })
}

/// One row of a study, one member of the source sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub j: usize,
    pub dist: f64,
    pub inc_l2_d0: f64,
    pub inc_h1_d0: f64,
    pub sol_l2_d: f64,
    /// `‖v_j‖_{H¹(D)}` (λ ≠ 1) or `‖v_j − uⁱ_j‖_{H¹(D₀)}` (λ = 1).
    pub sol_h1: f64,
    /// `‖v_j‖_{L^p(D)}`; NaN when not computed.
    pub sol_lp_d: f64,
    /// `‖v_j‖_{L^p(D)}/‖uⁱ_j‖_{L^p(D)}`; NaN when not computed.
    pub ratio: f64,
}

/// CSV header of a study.
pub const STUDY_HEADER: [&str; 8] = ["j", "dist", "inc_L2_D0", "inc_H1_D0", "sol_L2_D", "sol_H1_D", "sol_Lp_D", "ratio"];

impl StudyRow {
    pub fn values(&self) -> [f64; 8] {
        [
            self.j as f64,
            self.dist,
            self.inc_l2_d0,
            self.inc_h1_d0,
            self.sol_l2_d,
            self.sol_h1,
            self.sol_lp_d,
            self.ratio,
        ]
    }
}

/// Named slope of one column.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedFit {
    pub name: String,
    pub fit: GrowthFit,
}

/// Study rows ordered by `j` with fitted growth rates.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub fits: Vec<NamedFit>,
    /// Incident norm on `D₀` increases strictly with `j`.
    pub incident_monotone: bool,
    pub notes: Vec<String>,
}

impl StudyReport {
    pub fn fit(&self, name: &str) -> Option<GrowthFit> {
        self.fits.iter().find(|f| f.name == name).map(|f| f.fit)
    }

    /// Largest over smallest value of a column.
    pub fn spread(&self, column: impl Fn(&StudyRow) -> f64) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .map(&column)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi / lo
    }
}

fn fit_column(rows: &[StudyRow], from: usize, column: impl Fn(&StudyRow) -> f64) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.j >= from).map(|r| (r.j as f64, column(r))).collect();
    fit_growth_rate(&pts)
}

fn strictly_increasing(v: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = v.collect();
    v.windows(2).all(|w| w[1] > w[0])
}

// ---------------------------------------------------------------------------
// λ ≠ 1: boundary integral solves on a graded grid

/// Discretisation parameters of the `λ ≠ 1` study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BieStudyOptions {
    /// Boundary nodes.
    pub n: usize,
    /// Grading strength at `z*`.
    pub alpha: f64,
    /// Probe radius `r₀` of `D₀`.
    pub probe_radius: f64,
    /// Angular panels of the probe quadrature.
    pub probe_resolution: usize,
}

impl Default for BieStudyOptions {
    fn default() -> Self {
        BieStudyOptions { n: 512, alpha: 0.96, probe_radius: 0.25, probe_resolution: 8 }
    }
}

/// Smallest allowed ratio between `δ/J` and the local node spacing at `z*`.
pub const SPACING_FACTOR: f64 = 5.0;

/// Interior norms of `v` from its boundary traces, for constant real `k₁`.
struct TraceNorms {
    s1: Lu,
    k1mat: crate::linalg::CMatrix,
    s1mat: crate::linalg::CMatrix,
    k1: f64,
}

impl TraceNorms {
    fn new(grid: &BoundaryGrid, k1: f64) -> Result<Self> {
        let s1mat = assemble_s(grid, k1)?.matrix;
        let k1mat = assemble_k(grid, k1)?.matrix;
        let s1 = Lu::new(s1mat.clone())?;
        Ok(TraceNorms { s1, k1mat, s1mat, k1 })
    }

    /// `(‖v‖_{L²(D)}, ‖v‖_{H¹(D)})` from the Dirichlet trace of an interior
    /// solution of `Δv + k₁²v = 0`.
    ///
    /// With the Neumann trace `q` from `S₁q = v/2 + K₁v` and the tangential
    /// derivative by spectral differentiation,
    ///
    /// ```text
    /// k₁²‖v‖² = ∫_∂D Re((x·∇v̄) ∂νv) − (x·ν)|∇v|²/2 + (x·ν) k₁²|v|²/2,
    /// ‖∇v‖² = Re ∫_∂D v̄ ∂νv + k₁²‖v‖².
    /// ```
    fn norms(&self, grid: &BoundaryGrid, v: &[C64]) -> (f64, f64) {
        let n = grid.len();
        let kv = self.k1mat.matvec(v);
        let rhs: Vec<C64> = v.iter().zip(&kv).map(|(a, b)| a * 0.5 + b).collect();
        let q = self.s1.solve(&rhs);
        let interp = TrigInterp::new(v);
        let w = grid.weights();
        let k2 = self.k1 * self.k1;
        let mut rellich = 0.0;
        let mut green = 0.0;
        for i in 0..n {
            let tau = grid.dx[i] * (1.0 / grid.jac[i]);
            let nu = grid.normal[i];
            let dt = interp.derivative(grid.t[i]) / grid.jac[i];
            let x = grid.x[i];
            // ∇v = ∂νv ν + ∂τv τ.
            let xgrad = q[i] * x.dot(nu) + dt * x.dot(tau);
            let grad2 = q[i].norm_sqr() + dt.norm_sqr();
            let xn = x.dot(nu);
            rellich += w[i] * ((xgrad.conj() * q[i]).re - 0.5 * xn * grad2 + 0.5 * xn * k2 * v[i].norm_sqr());
            green += w[i] * (v[i].conj() * q[i]).re;
        }
        let l2sq = rellich / k2;
        let h1sq = l2sq + green + k2 * l2sq;
        (l2sq.max(0.0).sqrt(), h1sq.max(0.0).sqrt())
    }

    fn _s1(&self) -> &crate::linalg::CMatrix {
        &self.s1mat
    }
}

/// Bounded interior norms against blowing-up incident norms for `λ ≠ 1`
/// and a monopole sequence, by the boundary integral system.
pub fn boundedness_study_lambda_neq1(
    curve: &ParamCurve,
    medium: &MediumSpec,
    seq: &SourceSequence,
    options: BieStudyOptions,
) -> Result<StudyReport> {
    if medium.lambda == 1.0 {
        return Err(Error::invalid("this study needs λ ≠ 1; use boundedness_study_lambda_eq1"));
    }
    if seq.kind != SourceKind::Monopole {
        return Err(Error::invalid("the λ ≠ 1 study uses a monopole sequence"));
    }
    let n_const = match medium.n.as_constant() {
        Some(n) if n.im == 0.0 => n.re,
        _ => return Err(Error::invalid("the λ ≠ 1 study needs a constant real index")),
    };
    let grid = BoundaryGrid::graded(curve, options.n, seq.anchor_param, options.alpha)?;
    let (_, p) = grid.eval_param(seq.anchor_param);
    let spacing = p.jacobian() * TAU / grid.len() as f64;
    let closest = seq.distance(seq.count);
    if closest < SPACING_FACTOR * spacing {
        return Err(Error::Accuracy(alloc::format!(
            "δ/J = {closest:.3e} is below {SPACING_FACTOR}× the node spacing {spacing:.3e} at z*; \
             reduce J or refine the grid"
        )));
    }
    let sys = BieSystem::new(&grid, medium, BieOptions::default())?;
    let k1 = medium.k * n_const.sqrt();
    let traces = TraceNorms::new(&grid, k1)?;
    let s1 = &traces.s1mat;
    let k1m = &traces.k1mat;
    let gamma = medium.gamma();
    let (inc, _) = incident_norms_refined(
        seq,
        curve,
        options.probe_radius,
        options.probe_resolution,
        medium.k,
        0.01,
    )?;

    let rows = crate::par::map(seq.count, |i| -> Result<StudyRow> {
        let j = i + 1;
        let incident = seq.incident(j);
        let (f1, f2) = sys.incident_data(&incident)?;
        let (dens, _) = sys.solve_data(&f1, &f2)?;
        // v = γ(S₁φ + K₁ψ − ψ/2) on ∂D.
        let sphi = s1.matvec(&dens.phi);
        let kpsi = k1m.matvec(&dens.psi);
        let v: Vec<C64> = (0..grid.len())
            .map(|l| (sphi[l] + kpsi[l] - dens.psi[l] * 0.5) * gamma)
            .collect();
        let (l2, h1) = traces.norms(&grid, &v);
        Ok(StudyRow {
            j,
            dist: seq.distance(j),
            inc_l2_d0: inc[i].l2,
            inc_h1_d0: inc[i].h1,
            sol_l2_d: l2,
            sol_h1: h1,
            sol_lp_d: f64::NAN,
            ratio: f64::NAN,
        })
    });
    let rows: Vec<StudyRow> = rows.into_iter().enumerate().map(|(i, r)| r.map_err(|e| e.at(i + 1))).collect::<Result<_>>()?;
    let fits = vec![
        NamedFit { name: "sol_L2_D".into(), fit: fit_column(&rows, 1, |r| r.sol_l2_d)? },
        NamedFit { name: "sol_H1_D".into(), fit: fit_column(&rows, 1, |r| r.sol_h1)? },
        NamedFit { name: "inc_H1_D0".into(), fit: fit_column(&rows, 1, |r| r.inc_h1_d0)? },
        NamedFit { name: "inc_L2_D0".into(), fit: fit_column(&rows, 1, |r| r.inc_l2_d0)? },
    ];
    let incident_monotone = strictly_increasing(rows.iter().map(|r| r.inc_h1_d0));
    Ok(StudyReport {
        rows,
        fits,
        incident_monotone,
        notes: vec![alloc::format!(
            "graded grid N = {}, α = {}, spacing at z* = {spacing:.3e}, condition ≈ {:.3e}",
            options.n,
            options.alpha,
            sys.condition()
        )],
    })
}

// ---------------------------------------------------------------------------
// λ = 1: volume equation with dipole sources

/// Discretisation parameters of the `λ = 1` study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsStudyOptions {
    pub ls: LsOptions,
    pub probe_radius: f64,
    pub probe_resolution: usize,
    /// Angular panels of the whole-domain quadrature anchored at `z*`.
    pub domain_resolution: usize,
    /// First `j` used in the slope fits.
    pub fit_from: usize,
}

impl Default for LsStudyOptions {
    fn default() -> Self {
        LsStudyOptions {
            ls: LsOptions { grid: 128, ..LsOptions::default() },
            probe_radius: 0.25,
            probe_resolution: 8,
            domain_resolution: 8,
            fit_from: 1,
        }
    }
}

fn lp_norm(q: &VolumeQuadrature, p: f64, f: impl Fn(Vec2) -> Result<C64>) -> Result<f64> {
    let mut s = 0.0;
    for (x, w) in q.nodes.iter().zip(&q.weights) {
        s += w * f(*x)?.norm().powf(p);
    }
    Ok(s.powf(1.0 / p))
}

/// `L^p` bound of the volume-equation solution against the dipole data for
/// `λ = 1`.
pub fn boundedness_study_lambda_eq1(
    curve: &ParamCurve,
    medium: &MediumSpec,
    seq: &SourceSequence,
    p: f64,
    options: LsStudyOptions,
) -> Result<StudyReport> {
    if medium.lambda != 1.0 {
        return Err(Error::invalid("this study needs λ = 1; use boundedness_study_lambda_neq1"));
    }
    if seq.kind != SourceKind::Dipole {
        return Err(Error::invalid("the λ = 1 study uses a dipole sequence"));
    }
    if !(1.2 - 1e-12..2.0).contains(&p) {
        return Err(Error::invalid(alloc::format!("exponent p = {p} must lie in [6/5, 2)")));
    }
    let op = LsOperator::new(curve, medium, options.ls)?;
    let k = medium.k;
    let (inc, probe) = incident_norms_refined(
        seq,
        curve,
        options.probe_radius,
        options.probe_resolution,
        k,
        0.01,
    )?;
    let domain = anchored_domain_quadrature(curve, seq.anchor_param, options.domain_resolution);
    let mut rows = Vec::with_capacity(seq.count);
    let mut notes = Vec::new();
    for j in 1..=seq.count {
        let incident = seq.incident(j);
        let sol = op.solve(&incident, options.ls).map_err(|e| e.at(j))?;
        if j == 1 {
            notes.extend(sol.warnings().iter().cloned());
        }
        let v = |x: Vec2| sol.interior_interpolated(x).map(|(v, _)| v);
        let v_lp = lp_norm(&domain, p, v)?;
        let v_l2 = lp_norm(&domain, 2.0, v)?;
        let ui_lp = lp_norm(&domain, p, |x| incident.value(k, x))?;
        let (_, w_h1) = field_norms(&probe.quadrature, |x| Ok(sol.interpolate(x)))?;
        rows.push(StudyRow {
            j,
            dist: seq.distance(j),
            inc_l2_d0: inc[j - 1].l2,
            inc_h1_d0: inc[j - 1].h1,
            sol_l2_d: v_l2,
            sol_h1: w_h1,
            sol_lp_d: v_lp,
            ratio: v_lp / ui_lp,
        });
    }
    let from = options.fit_from;
    let columns: [(&str, fn(&StudyRow) -> f64); 5] = [
        ("ratio", |r| r.ratio),
        ("sol_H1_D0", |r| r.sol_h1),
        ("sol_Lp_D", |r| r.sol_lp_d),
        ("inc_L2_D0", |r| r.inc_l2_d0),
        ("inc_Lp_D", |r| r.sol_lp_d / r.ratio),
    ];
    let mut fits = Vec::with_capacity(columns.len());
    for (name, column) in columns {
        // Without contrast v − uⁱ vanishes identically and has no growth rate.
        if rows.iter().all(|r| column(r) == 0.0) {
            notes.push(alloc::format!("{name} is identically zero; no fit"));
            continue;
        }
        fits.push(NamedFit { name: name.into(), fit: fit_column(&rows, from, column)? });
    }
    let incident_monotone = strictly_increasing(rows.iter().map(|r| r.inc_l2_d0));
    Ok(StudyReport { rows, fits, incident_monotone, notes })
}

// ---------------------------------------------------------------------------
// estimate witness for the two-step construction

/// One member of the estimate witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessRow {
    pub j: usize,
    pub w2_l2: f64,
    pub f1_l2: f64,
    pub f2_l2: f64,
    /// `‖w₂‖_{L²(D)}/(‖f₁‖_{L²(∂D)} + ‖f₂‖_{L²(∂D)})`.
    pub constant: f64,
}

/// Measures `‖w₂‖ ≤ C(‖f₁‖ + ‖f₂‖)` along a monopole sequence on a disk
/// centred at the origin, with the image data
/// `f₁ = −Φ(·, z_j) − Φ(·, y_j)`, `f₂ = −∂νΦ(·, z_j) − ∂νΦ(·, y_j)`,
/// `y_j = z* − (δ/j)ν`, solved by the two-step construction.
pub fn estimate_witness(
    radius: f64,
    medium: &MediumSpec,
    seq: &SourceSequence,
    options: SovOptions,
) -> Result<Vec<WitnessRow>> {
    let k = medium.k;
    let mm = options.cutoff;
    let (jr, djr) = bessel_j_with_derivative(mm, k * radius);
    let (hr, dhr) = hankel1_with_derivative(mm, k * radius);
    let mut out = Vec::with_capacity(seq.count);
    for j in 1..=seq.count {
        let z = seq.points[j - 1];
        let y = seq.image(j);
        if y.norm() >= radius {
            return Err(Error::invalid("image point must lie inside the disk"));
        }
        let (hz, _) = hankel1_with_derivative(mm, k * z.norm());
        let jy = if y.norm() > 0.0 { bessel_j_with_derivative(mm, k * y.norm()).0 } else {
            let mut v = vec![0.0; mm + 1];
            v[0] = 1.0;
            v
        };
        let (tz, ty) = (z.angle(), if y.norm() > 0.0 { y.angle() } else { 0.0 });
        let mut f1 = Vec::with_capacity(2 * mm + 1);
        let mut f2 = Vec::with_capacity(2 * mm + 1);
        for m in -(mm as i64)..=mm as i64 {
            let a = m.unsigned_abs() as usize;
            // Sign factors of negative orders appear squared and cancel.
            let ez = crate::math::cis(-(m as f64) * tz);
            let ey = crate::math::cis(-(m as f64) * ty);
            let q = C64::new(0.0, 0.25);
            let v1 = q * (hz[a] * jr[a] * ez + hr[a] * jy[a] * ey);
            let v2 = q * k * (hz[a] * djr[a] * ez + dhr[a] * jy[a] * ey);
            f1.push(-v1);
            f2.push(-v2);
        }
        let (total, _, _) = two_step_modes(radius, medium, &f1, &f2, options).map_err(|e| e.at(j))?;
        let norm = |c: &[C64]| (TAU * radius * c.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
        let (n1, n2) = (norm(&f1), norm(&f2));
        let w2 = total.w2_l2_norm();
        out.push(WitnessRow { j, w2_l2: w2, f1_l2: n1, f2_l2: n2, constant: w2 / (n1 + n2) });
    }
    Ok(out)
}
