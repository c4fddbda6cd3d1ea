//! Separation of variables on the disk `|x| < R` with radial index.
//!
//! Every field is expanded in `e^{imθ}`, `|m| ≤ M`. Outside, the scattered
//! mode is `a_m H_m(kr)`. Inside, the mode of `w₂ = λv` is written as
//! `(r/R)^{|m|} w(r)`, which turns the radial equation into
//!
//! ```text
//! r w″ + (2|m| + 1) w′ + k²n(r) r w = r σ(r),   s = (r/R)^{|m|} σ,
//! ```
//!
//! regular at `r = 0` without any extra condition. It is solved by
//! Chebyshev collocation on `[0, R]`.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Diagnostics, FieldSolution, IndexProfile, MediumSpec, Representation, SolverTag};
use crate::error::{Error, Result};
use crate::geometry::Containment;
use crate::linalg::{solve_dense, CMatrix};
use crate::math::{cis, CVec2, Vec2, C64, I, PI, TAU};
use crate::quadrature::{chebyshev, clenshaw_curtis};
use crate::special::{bessel_j_with_derivative, hankel1_with_derivative, IncidentField, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SovOptions {
    /// Mode cutoff `M`: modes `|m| ≤ M` are kept.
    pub cutoff: usize,
    /// Chebyshev polynomial degree of the radial solver.
    pub degree: usize,
    /// Largest accepted relative magnitude of the outermost modes.
    pub tail_tol: f64,
}

impl Default for SovOptions {
    fn default() -> Self {
        SovOptions { cutoff: 20, degree: 48, tail_tol: 1e-10 }
    }
}

/// Radial mode solver for one disk, medium and discretisation.
#[derive(Debug, Clone)]
pub struct SovSolver {
    radius: f64,
    medium: MediumSpec,
    options: SovOptions,
    grid: Arc<RadialGrid>,
    index: Vec<C64>,
}

/// Chebyshev nodes on `[0, R]`, ordered from `r = R` down to `r = 0`.
#[derive(Debug)]
struct RadialGrid {
    radius: f64,
    r: Vec<f64>,
    /// Differentiation matrix in `r`, row-major.
    d: Vec<f64>,
    /// Clenshaw–Curtis weights for `∫_0^R · dr`.
    w: Vec<f64>,
    /// Barycentric weights.
    bary: Vec<f64>,
}

impl RadialGrid {
    fn new(radius: f64, degree: usize) -> Self {
        let (x, dx) = chebyshev(degree);
        let r = x.iter().map(|t| 0.5 * radius * (t + 1.0)).collect();
        let d = dx.iter().map(|v| v * 2.0 / radius).collect();
        let w = clenshaw_curtis(degree).iter().map(|v| v * 0.5 * radius).collect();
        let bary = (0..=degree)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == degree {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        RadialGrid { radius, r, d, w, bary }
    }

    fn len(&self) -> usize {
        self.r.len()
    }

    fn diff(&self, f: &[C64]) -> Vec<C64> {
        let m = self.len();
        (0..m).map(|i| (0..m).map(|j| f[j] * self.d[i * m + j]).sum()).collect()
    }

    /// Barycentric interpolation of nodal values at `r`.
    fn interp(&self, f: &[C64], r: f64) -> C64 {
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, &rj) in self.r.iter().enumerate() {
            let dr = r - rj;
            if dr == 0.0 {
                return f[j];
            }
            let c = self.bary[j] / dr;
            num += f[j] * c;
            den += c;
        }
        num / den
    }
}

/// One angular mode of `w₂`: nodal values of the reduced profile `w` and of `w′`.
#[derive(Debug, Clone)]
struct ModeProfile {
    w: Vec<C64>,
    dw: Vec<C64>,
}

impl ModeProfile {
    fn zeros(n: usize) -> Self {
        ModeProfile { w: vec![C64::new(0.0, 0.0); n], dw: vec![C64::new(0.0, 0.0); n] }
    }

    fn axpy(&mut self, s: C64, other: &ModeProfile) {
        for (a, b) in self.w.iter_mut().zip(&other.w) {
            *a += b * s;
        }
        for (a, b) in self.dw.iter_mut().zip(&other.dw) {
            *a += b * s;
        }
    }
}

/// Modal solution `(w₁, w₂)` of the disk transmission system.
#[derive(Debug, Clone)]
pub struct SovSolution {
    k: f64,
    gamma: f64,
    cutoff: usize,
    grid: Arc<RadialGrid>,
    /// Boundary values `a_m H_m(kR)` of the exterior modes, `m = −M..=M`.
    boundary: Vec<C64>,
    /// `H_m(kR)` for `m = 0..=M`.
    h_at_r: Vec<C64>,
    interior: Vec<ModeProfile>,
    tail: f64,
}

fn signed<T: core::ops::Neg<Output = T>>(m: i64, v: T) -> T {
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

impl SovSolver {
    pub fn new(radius: f64, medium: &MediumSpec, options: SovOptions) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("disk radius must be finite and > 0"));
        }
        if !medium.n.is_radial() {
            return Err(Error::invalid("separation of variables needs a constant or radial index"));
        }
        if options.cutoff > MAX_ORDER as usize {
            return Err(Error::OutOfRange(alloc::format!(
                "mode cutoff {} exceeds the supported order {MAX_ORDER}",
                options.cutoff
            )));
        }
        if options.degree < 8 {
            return Err(Error::invalid("radial degree must be at least 8"));
        }
        medium.check_radial(radius)?;
        let grid = Arc::new(RadialGrid::new(radius, options.degree));
        let index = grid.r.iter().map(|&r| medium.n.eval_radial(r).expect("radial")).collect();
        Ok(SovSolver { radius, medium: medium.clone(), options, grid, index })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }

    pub fn options(&self) -> SovOptions {
        self.options
    }

    fn modes(&self) -> impl Iterator<Item = i64> {
        let m = self.options.cutoff as i64;
        -m..=m
    }

    /// Coefficients `α_m` with `uⁱ = Σ α_m J_m(kr) e^{imθ}` near the disk.
    pub fn incident_coefficients(&self, incident: &IncidentField) -> Result<Vec<C64>> {
        incident.validate()?;
        let k = self.medium.k;
        let mm = self.options.cutoff;
        if let Some(z) = incident.source() {
            if z.norm() <= self.radius * (1.0 + 1e-12) {
                return Err(Error::invalid("point or dipole source must lie strictly outside the disk"));
            }
        }
        Ok(match *incident {
            IncidentField::PlaneWave { d } => {
                let th = d.angle();
                self.modes().map(|m| I.powi(m as i32) * cis(-(m as f64) * th)).collect()
            }
            IncidentField::PointSource { z } => {
                let (h, _) = hankel1_with_derivative(mm, k * z.norm());
                let th = z.angle();
                self.modes()
                    .map(|m| signed(m, h[m.unsigned_abs() as usize]) * I * 0.25 * cis(-(m as f64) * th))
                    .collect()
            }
            IncidentField::Dipole { z, a } => {
                let rho = z.norm();
                let (h, dh) = hankel1_with_derivative(mm, k * rho);
                let th = z.angle();
                let a_rho = a.dot(Vec2::polar(1.0, th));
                let a_phi = a.dot(Vec2::polar(1.0, th + 0.5 * PI));
                self.modes()
                    .map(|m| {
                        let i = m.unsigned_abs() as usize;
                        let (hm, dhm) = (signed(m, h[i]), signed(m, dh[i]));
                        let mf = m as f64;
                        -I * 0.25 * (dhm * (k * a_rho) - I * (mf / rho) * a_phi * hm) * cis(-mf * th)
                    })
                    .collect()
            }
        })
    }

    /// Scattering data `f₁ = −uⁱ`, `f₂ = −∂_r uⁱ` per mode on `r = R`.
    pub fn scattering_data(&self, incident: &IncidentField) -> Result<(Vec<C64>, Vec<C64>)> {
        let alpha = self.incident_coefficients(incident)?;
        let k = self.medium.k;
        let (j, dj) = bessel_j_with_derivative(self.options.cutoff, k * self.radius);
        let mut f1 = Vec::with_capacity(alpha.len());
        let mut f2 = Vec::with_capacity(alpha.len());
        for (m, a) in self.modes().zip(&alpha) {
            let i = m.unsigned_abs() as usize;
            f1.push(-a * signed(m, j[i]));
            f2.push(-a * (k * signed(m, dj[i])));
        }
        Ok((f1, f2))
    }

    /// Reduced radial profile for mode `|m|` with source `σ` (or the
    /// homogeneous solution with `w(0) = 1` when `sigma` is `None`).
    fn radial(&self, m: usize, sigma: Option<&[C64]>) -> Result<ModeProfile> {
        let g = &self.grid;
        let n = g.len();
        let k2 = self.medium.k * self.medium.k;
        let mf = (2 * m + 1) as f64;
        let mut a = CMatrix::zeros(n, n);
        // D² via two products would square rounding; build r D² + (2m+1) D directly.
        let d2: Vec<f64> = {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for l in 0..n {
                    let dil = g.d[i * n + l];
                    if dil == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        out[i * n + j] += dil * g.d[l * n + j];
                    }
                }
            }
            out
        };
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for i in 1..n {
            let r = g.r[i];
            for j in 0..n {
                a[(i, j)] = C64::new(r * d2[i * n + j] + mf * g.d[i * n + j], 0.0);
            }
            a[(i, i)] += self.index[i] * (k2 * r);
            if let Some(s) = sigma {
                rhs[i] = s[i] * r;
            }
        }
        // The row at r = R is traded for the normalisation at r = 0.
        a[(0, n - 1)] = C64::new(1.0, 0.0);
        rhs[0] = if sigma.is_some() { C64::new(0.0, 0.0) } else { C64::new(1.0, 0.0) };
        let w = solve_dense(a, &rhs).map_err(|_| {
            Error::Resonance { mode: m as i64, det: 0.0 }
        })?;
        let dw = g.diff(&w);
        Ok(ModeProfile { w, dw })
    }

    /// Solves `w₁ − γw₂ = f₁`, `∂_r w₁ − ∂_r w₂ = f₂` on `r = R` with
    /// interior source `s = (r/R)^{|m|} σ_m` given at the radial nodes.
    pub fn solve_data(&self, f1: &[C64], f2: &[C64]) -> Result<SovSolution> {
        self.solve_with_source(f1, f2, None)
    }

    fn solve_with_source(&self, f1: &[C64], f2: &[C64], source: Option<&[Vec<C64>]>) -> Result<SovSolution> {
        let mm = self.options.cutoff;
        let nm = 2 * mm + 1;
        if f1.len() != nm || f2.len() != nm {
            return Err(Error::invalid(alloc::format!("mode data must have 2M+1 = {nm} entries")));
        }
        let k = self.medium.k;
        let rr = self.radius;
        let gamma = self.medium.gamma();
        let (h, dh) = hankel1_with_derivative(mm, k * rr);

        let homog: Vec<ModeProfile> = crate::par::map(mm + 1, |m| self.radial(m, None))
            .into_iter()
            .collect::<Result<_>>()?;

        let mut boundary = Vec::with_capacity(nm);
        let mut interior = Vec::with_capacity(nm);
        for (idx, m) in self.modes().enumerate() {
            let am = m.unsigned_abs() as usize;
            let hv = homog[am].w[0];
            let hd = homog[am].dw[0] + homog[am].w[0] * (am as f64 / rr);
            let (pv, pd, part) = match source {
                Some(src) => {
                    let p = self.radial(am, Some(&src[idx]))?;
                    (p.w[0], p.dw[0] + p.w[0] * (am as f64 / rr), Some(p))
                }
                None => (C64::new(0.0, 0.0), C64::new(0.0, 0.0), None),
            };
            // Unknowns: boundary value b = a H_m(kR) and interior amplitude c.
            let log_dh = k * dh[am] / h[am];
            let r1 = f1[idx] + pv * gamma;
            let r2 = f2[idx] + pd;
            let (a11, a12, a21, a22) = (C64::new(1.0, 0.0), -hv * gamma, log_dh, -hd);
            let det = a11 * a22 - a12 * a21;
            let scale = (a11.norm() + a12.norm()) * (a21.norm() + a22.norm());
            if !(det.norm() > 1e-13 * scale) {
                return Err(Error::Resonance { mode: m, det: det.norm() });
            }
            let b = (r1 * a22 - a12 * r2) / det;
            let c = (a11 * r2 - a21 * r1) / det;
            let mut prof = ModeProfile::zeros(self.grid.len());
            prof.axpy(c, &homog[am]);
            if let Some(p) = part {
                prof.axpy(C64::new(1.0, 0.0), &p);
            }
            boundary.push(b);
            interior.push(prof);
        }

        let tail = relative_tail(&boundary);
        if mm >= 2 && tail > self.options.tail_tol {
            return Err(Error::Truncation { tail, tol: self.options.tail_tol, cutoff: mm });
        }
        Ok(SovSolution { k, gamma, cutoff: mm, grid: self.grid.clone(), boundary, h_at_r: h, interior, tail })
    }

    /// Scattering solution for one incident field.
    pub fn solve(&self, incident: &IncidentField) -> Result<SovSolution> {
        let (f1, f2) = self.scattering_data(incident)?;
        self.solve_data(&f1, &f2)
    }
}

impl SovSolution {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn radius(&self) -> f64 {
        self.grid.radius
    }

    /// Largest relative magnitude among the two outermost modes on each side.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Exterior coefficients `a_m` of `w₁ = Σ a_m H_m(kr) e^{imθ}`, `m = −M..=M`.
    pub fn exterior_coefficients(&self) -> Vec<C64> {
        let mm = self.cutoff as i64;
        (-mm..=mm)
            .zip(&self.boundary)
            .map(|(m, b)| b / signed(m, self.h_at_r[m.unsigned_abs() as usize]))
            .collect()
    }

    /// Boundary values of the exterior modes, `a_m H_m(kR)`.
    pub fn boundary_values(&self) -> &[C64] {
        &self.boundary
    }

    /// Boundary values and radial derivatives of the `w₂` modes on `r = R`.
    pub fn interior_boundary_values(&self) -> Vec<(C64, C64)> {
        let mm = self.cutoff as i64;
        let rr = self.radius();
        (-mm..=mm)
            .zip(&self.interior)
            .map(|(m, p)| (p.w[0], p.dw[0] + p.w[0] * (m.unsigned_abs() as f64 / rr)))
            .collect()
    }

    fn sum(&self, other: &SovSolution) -> SovSolution {
        let mut out = self.clone();
        for (a, b) in out.boundary.iter_mut().zip(&other.boundary) {
            *a += b;
        }
        for (a, b) in out.interior.iter_mut().zip(&other.interior) {
            a.axpy(C64::new(1.0, 0.0), b);
        }
        out.tail = relative_tail(&out.boundary);
        out
    }

    /// `w₁` and its gradient at `|x| ≥ R`.
    pub fn w1(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let r = x.norm();
        let rr = self.radius();
        if r < rr * (1.0 - 1e-14) {
            return Err(Error::Domain("exterior modes evaluated inside the disk".into()));
        }
        let k = self.k;
        let th = x.angle();
        let (h, dh) = hankel1_with_derivative(self.cutoff, k * r);
        let mm = self.cutoff as i64;
        let mut u = C64::new(0.0, 0.0);
        let mut ur = C64::new(0.0, 0.0);
        let mut ut = C64::new(0.0, 0.0);
        for (m, b) in (-mm..=mm).zip(&self.boundary) {
            let i = m.unsigned_abs() as usize;
            // Sign factors of H_{−m} cancel in the ratio.
            let e = cis(m as f64 * th) * b / self.h_at_r[i];
            u += e * h[i];
            ur += e * (k * dh[i]);
            ut += e * h[i] * (I * m as f64);
        }
        Ok((u, polar_gradient(ur, ut / r, th)))
    }

    /// `w₂` and its gradient at `|x| ≤ R`.
    pub fn w2(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let r = x.norm();
        let rr = self.radius();
        if r > rr * (1.0 + 1e-14) {
            return Err(Error::Domain("interior modes evaluated outside the disk".into()));
        }
        let r = r.min(rr);
        let th = if r > 0.0 { x.angle() } else { 0.0 };
        let mm = self.cutoff as i64;
        let mut u = C64::new(0.0, 0.0);
        let mut ur = C64::new(0.0, 0.0);
        let mut ut_over_r = C64::new(0.0, 0.0);
        let mut grad_origin = CVec2::default();
        for (m, p) in (-mm..=mm).zip(&self.interior) {
            let am = m.unsigned_abs() as i32;
            let w = self.grid.interp(&p.w, r);
            let dw = self.grid.interp(&p.dw, r);
            let e = cis(m as f64 * th);
            let rm = (r / rr).powi(am);
            u += e * w * rm;
            if am == 0 {
                ur += e * dw;
            } else {
                // (r/R)^{|m|}/r written so that r = 0 is harmless.
                let rm1 = r.powi(am - 1) / rr.powi(am);
                ur += e * (w * (am as f64 * rm1) + dw * rm);
                ut_over_r += e * w * rm1 * (I * m as f64);
                if am == 1 && r == 0.0 {
                    // ∇(x ± iy)/R = (1, ±i)/R.
                    grad_origin = grad_origin
                        + CVec2::new(w / rr, w * (I * m.signum() as f64) / rr);
                }
            }
        }
        if r == 0.0 {
            return Ok((u, grad_origin));
        }
        Ok((u, polar_gradient(ur, ut_over_r, th)))
    }

    /// Interior field `v = γ w₂`.
    pub fn interior(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let (v, g) = self.w2(x)?;
        Ok((v * self.gamma, g * self.gamma))
    }

    /// `‖w₂‖_{L²(D)}` by Parseval in θ and Clenshaw–Curtis in r.
    pub fn w2_l2_norm(&self) -> f64 {
        let rr = self.radius();
        let mm = self.cutoff as i64;
        let mut s = 0.0;
        for (m, p) in (-mm..=mm).zip(&self.interior) {
            let am = m.unsigned_abs() as i32;
            for ((w, &r), &q) in p.w.iter().zip(&self.grid.r).zip(&self.grid.w) {
                s += q * r * (r / rr).powi(2 * am) * w.norm_sqr();
            }
        }
        (TAU * s).sqrt()
    }

    /// `‖v‖_{L²(D)}`.
    pub fn interior_l2_norm(&self) -> f64 {
        self.gamma * self.w2_l2_norm()
    }

    /// `‖∇v‖_{L²(D)}`.
    pub fn interior_gradient_norm(&self) -> f64 {
        let rr = self.radius();
        let mm = self.cutoff as i64;
        let mut s = 0.0;
        for (m, p) in (-mm..=mm).zip(&self.interior) {
            let am = m.unsigned_abs() as i32;
            for i in 0..self.grid.len() {
                let r = self.grid.r[i];
                let q = self.grid.w[i];
                let (w, dw) = (p.w[i], p.dw[i]);
                // |∂_r V|² + m²|V|²/r² with V = (r/R)^{|m|} w.
                let (dv, vr) = if am == 0 {
                    (dw, C64::new(0.0, 0.0))
                } else {
                    let rm1 = r.powi(am - 1) / rr.powi(am);
                    (w * (am as f64 * rm1) + dw * (r / rr).powi(am), w * rm1 * m.abs() as f64)
                };
                s += q * r * (dv.norm_sqr() + vr.norm_sqr());
            }
        }
        self.gamma * (TAU * s).sqrt()
    }

    /// Far-field samples at `M` equispaced angles.
    pub fn far_field_samples(&self, count: usize) -> Vec<C64> {
        let a = self.exterior_coefficients();
        let pre = cis(-0.25 * PI) * (2.0 / (PI * self.k)).sqrt();
        let mm = self.cutoff as i64;
        (0..count)
            .map(|j| {
                let th = TAU * j as f64 / count as f64;
                let mut s = C64::new(0.0, 0.0);
                for (m, am) in (-mm..=mm).zip(&a) {
                    s += am * (-I).powi(m as i32) * cis(m as f64 * th);
                }
                s * pre
            })
            .collect()
    }

    /// `∫|u∞|²` from the modes, `(4/k) Σ |a_m|²`.
    pub fn modal_energy(&self) -> f64 {
        self.exterior_coefficients().iter().map(|a| a.norm_sqr()).sum::<f64>() * 4.0 / self.k
    }
}

fn relative_tail(boundary: &[C64]) -> f64 {
    let nm = boundary.len();
    let peak = boundary.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let edge = boundary
        .iter()
        .enumerate()
        .filter(|(i, _)| *i < 2 || *i + 2 >= nm)
        .map(|(_, b)| b.norm())
        .fold(0.0, f64::max);
    if peak > 0.0 {
        edge / peak
    } else {
        0.0
    }
}

fn polar_gradient(ur: C64, ut_over_r: C64, th: f64) -> CVec2 {
    let (s, c) = th.sin_cos();
    CVec2::new(ur * c - ut_over_r * s, ur * s + ut_over_r * c)
}

struct SovField {
    sol: SovSolution,
    radius: f64,
}

impl Representation for SovField {
    fn region(&self, x: Vec2) -> Containment {
        let d = x.norm() - self.radius;
        if d.abs() <= 1e-9 * self.radius {
            Containment::NearBoundary
        } else if d < 0.0 {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    fn scattered(&self, x: Vec2) -> Result<(C64, CVec2)> {
        self.sol.w1(x)
    }

    fn interior(&self, x: Vec2) -> Result<(C64, CVec2)> {
        self.sol.interior(x)
    }

    fn far_field(&self, m: usize) -> Result<Vec<C64>> {
        Ok(self.sol.far_field_samples(m))
    }
}

fn wrap(sol: SovSolution, medium: &MediumSpec, incident: IncidentField) -> FieldSolution {
    let diagnostics = Diagnostics { truncation_tail: Some(sol.tail), ..Default::default() };
    let radius = sol.radius();
    FieldSolution::new(SolverTag::Sov, medium.clone(), incident, diagnostics, Box::new(SovField { sol, radius }))
}

/// Solves the transmission problem on the disk `|x| < R` by separation of variables.
pub fn sov_solve(
    radius: f64,
    medium: &MediumSpec,
    incident: &IncidentField,
    options: SovOptions,
) -> Result<FieldSolution> {
    let solver = SovSolver::new(radius, medium, options)?;
    let sol = solver.solve(incident)?;
    Ok(wrap(sol, medium, *incident))
}

/// Two-step construction for radial `n`: first the problem with the
/// constant interior wave number `k₁² = k²n(R)`, then the correction with
/// source `g = (k₁² − k²n) w̃₂` and homogeneous jumps. Returns the modal sum
/// together with the two parts.
pub fn two_step_modes(
    radius: f64,
    medium: &MediumSpec,
    f1: &[C64],
    f2: &[C64],
    options: SovOptions,
) -> Result<(SovSolution, SovSolution, SovSolution)> {
    let n_edge = medium
        .n
        .eval_radial(radius)
        .ok_or_else(|| Error::invalid("two-step construction needs a radial index"))?;
    let step1_medium = MediumSpec::new(medium.k, medium.lambda, IndexProfile::Constant(n_edge))?;
    let step1 = SovSolver::new(radius, &step1_medium, options)?.solve_data(f1, f2)?;
    let solver = SovSolver::new(radius, medium, options)?;
    let k2 = medium.k * medium.k;
    let k1sq = n_edge * k2;
    let source: Vec<Vec<C64>> = step1
        .interior
        .iter()
        .map(|p| p.w.iter().zip(&solver.index).map(|(w, n)| (k1sq - n * k2) * w).collect())
        .collect();
    let zeros = vec![C64::new(0.0, 0.0); f1.len()];
    let mut opts = solver.clone();
    // The correction alone can be dominated by its outer modes; the tail is
    // judged on the sum.
    opts.options.tail_tol = f64::INFINITY;
    let step2 = opts.solve_with_source(&zeros, &zeros, Some(&source))?;
    let total = step1.sum(&step2);
    Ok((total, step1, step2))
}

/// Two-step solution of the scattering problem on a disk with radial `n`.
pub fn two_step_variable_n(
    radius: f64,
    medium: &MediumSpec,
    incident: &IncidentField,
    options: SovOptions,
) -> Result<FieldSolution> {
    let solver = SovSolver::new(radius, medium, options)?;
    let (f1, f2) = solver.scattering_data(incident)?;
    let (total, _, _) = two_step_modes(radius, medium, &f1, &f2, options)?;
    Ok(wrap(total, medium, *incident))
}
