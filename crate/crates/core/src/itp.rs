//! Interior transmission problems on the disk `|x| < R`.
//!
//! ITP: `ΔU + k²nU = 0`, `ΔV + k²V = 0`, `U − V = f₁`, `∂_r U − ∂_r V = f₂`.
//! MITP: `ΔU − U = ρ₁`, `ΔV − V = ρ₂`, `U − V = f₁`, `λ∂_r U − ∂_r V = f₂`.
//!
//! Both decouple in angular modes `e^{imθ}`, `|m| ≤ M`. Boundary data are
//! lists of `2M + 1` Fourier coefficients ordered `m = −M..=M`, and trace
//! norms are the Fourier-weighted norms
//! `‖f‖²_{H^s} = 2πR Σ (1 + m²)^s |f_m|²`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::math::{bisect, C64, TAU};
use crate::quadrature::gauss_legendre_on;
use crate::special::{bessel_i_seq, bessel_j_seq, first_zero_j0, MAX_ORDER, MAX_ORDER_MODIFIED};

/// First Dirichlet eigenvalue of `−Δ` on the disk of radius `R`.
pub fn dirichlet_lambda1(radius: f64) -> Result<f64> {
    check_radius(radius)?;
    let j = first_zero_j0();
    Ok((j / radius) * (j / radius))
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("disk radius {radius} must be finite and > 0")))
    }
}

/// Outcome of the smallness test `k² < min{λ₁, λ₁/sup n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessCondition {
    pub satisfied: bool,
    /// `min{λ₁, λ₁/sup n} − k²`.
    pub margin: f64,
    pub lambda1: f64,
    pub bound: f64,
}

/// Evaluates `k² < min{λ₁(Ω), λ₁(Ω)/sup n}` on the disk of radius `R`.
pub fn corollary21_condition(radius: f64, sup_n: f64, k: f64) -> Result<SmallnessCondition> {
    if !(sup_n.is_finite() && sup_n > 0.0) {
        return Err(Error::invalid("sup n must be finite and > 0"));
    }
    let lambda1 = dirichlet_lambda1(radius)?;
    let bound = lambda1.min(lambda1 / sup_n);
    let margin = bound - k * k;
    Ok(SmallnessCondition { satisfied: margin > 0.0, margin, lambda1, bound })
}

fn check_contrast(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Physics(alloc::format!("index n = {n} must be > 0")));
    }
    if n == 1.0 {
        return Err(Error::invalid("the interior transmission problem needs contrast n ≠ 1"));
    }
    Ok(())
}

/// Transmission-eigenvalue determinant of mode `m` on the disk,
///
/// ```text
/// d_m(k) = J_m(k√n R) k J′_m(kR) − J_m(kR) k√n J′_m(k√n R)
///        = (1/R)[A J_m(B) J_{m+1}(A) − B J_m(A) J_{m+1}(B)],  A = k√nR, B = kR.
/// ```
///
/// The second form avoids cancellation in the derivatives. `d_{−m} = d_m`.
pub fn te_determinant(radius: f64, n: f64, m: i64, k: f64) -> Result<f64> {
    check_radius(radius)?;
    check_contrast(n)?;
    let am = m.unsigned_abs() as usize;
    if am as i32 >= MAX_ORDER {
        return Err(Error::OutOfRange(alloc::format!("mode {m} exceeds the supported order")));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::invalid("wave number must be finite and ≥ 0"));
    }
    Ok(determinant(radius, n, am, k))
}

fn determinant(radius: f64, n: f64, m: usize, k: f64) -> f64 {
    let a = k * n.sqrt() * radius;
    let b = k * radius;
    let ja = bessel_j_seq(m + 1, a);
    let jb = bessel_j_seq(m + 1, b);
    (a * jb[m] * ja[m + 1] - b * ja[m] * jb[m + 1]) / radius
}

/// Lowest transmission eigenvalue found in a window, and its mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeRoot {
    pub k: f64,
    pub mode: i64,
}

/// Samples per unit of `k√n R` used to bracket sign changes.
const SCAN_DENSITY: f64 = 200.0;

/// All sign-change roots of `d_m` in `(k_lo, k_hi]`, ascending.
pub fn te_roots(radius: f64, n: f64, m: i64, k_lo: f64, k_hi: f64) -> Result<Vec<f64>> {
    check_radius(radius)?;
    check_contrast(n)?;
    if !(k_lo >= 0.0 && k_hi > k_lo && k_hi.is_finite()) {
        return Err(Error::invalid("eigenvalue window must satisfy 0 ≤ k_lo < k_hi < ∞"));
    }
    let am = m.unsigned_abs() as usize;
    if am as i32 >= MAX_ORDER {
        return Err(Error::OutOfRange(alloc::format!("mode {m} exceeds the supported order")));
    }
    // Scan in x = kR so that windows scaled with 1/R give identical brackets.
    let (x_lo, x_hi) = (k_lo * radius, k_hi * radius);
    let span = (x_hi - x_lo) * n.sqrt().max(1.0);
    let steps = ((span * SCAN_DENSITY).ceil() as usize).max(64);
    let f = |x: f64| determinant(1.0, n, am, x);
    let mut roots = Vec::new();
    // High modes underflow to an exact zero near k = 0, so only a sign flip
    // between nonzero samples counts; `(xa, fa)` is the last nonzero sample.
    let mut xa = x_lo.max(1e-6 * (x_hi - x_lo));
    let mut fa = f(xa);
    for i in 1..=steps {
        let xb = x_lo + (x_hi - x_lo) * i as f64 / steps as f64;
        let fb = f(xb);
        if fb == 0.0 {
            continue;
        }
        if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            let x = bisect(f, xa, xb, 0.0);
            roots.push(x / radius);
        }
        xa = xb;
        fa = fb;
    }
    Ok(roots)
}

/// Smallest transmission eigenvalue over modes `|m| ≤ M` in `(k_lo, k_hi]`.
pub fn smallest_te(radius: f64, n: f64, cutoff: usize, k_lo: f64, k_hi: f64) -> Result<TeRoot> {
    if cutoff < 10 {
        return Err(Error::invalid("eigenvalue scans need a mode cutoff M ≥ 10"));
    }
    let per_mode = crate::par::map(cutoff + 1, |m| te_roots(radius, n, m as i64, k_lo, k_hi));
    let mut best: Option<TeRoot> = None;
    for (m, r) in per_mode.into_iter().enumerate() {
        if let Some(&k) = r?.first() {
            if best.is_none_or(|b| k < b.k) {
                best = Some(TeRoot { k, mode: m as i64 });
            }
        }
    }
    best.ok_or_else(|| {
        Error::NotFound(alloc::format!(
            "no transmission eigenvalue in ({k_lo}, {k_hi}] for |m| ≤ {cutoff}; widen the window"
        ))
    })
}

/// Default eigenvalue window `(0, 4k]` and cutoff used by [`itp_solve`].
pub const DEFAULT_WINDOW_FACTOR: f64 = 4.0;
/// Distance in `k` below which a transmission eigenvalue makes the ITP ill-posed.
pub const EIGENVALUE_GUARD: f64 = 1e-6;

/// Disk ITP with constant index and Fourier boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ItpDiskSpec {
    pub radius: f64,
    pub n: f64,
    pub k: f64,
    pub cutoff: usize,
    pub f1: Vec<C64>,
    pub f2: Vec<C64>,
}

impl ItpDiskSpec {
    fn validate(&self) -> Result<()> {
        check_radius(self.radius)?;
        check_contrast(self.n)?;
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::invalid("wave number must be finite and > 0"));
        }
        if self.cutoff as i32 >= MAX_ORDER {
            return Err(Error::OutOfRange("mode cutoff exceeds the supported order".into()));
        }
        let nm = 2 * self.cutoff + 1;
        if self.f1.len() != nm || self.f2.len() != nm {
            return Err(Error::invalid(alloc::format!("boundary data must have 2M+1 = {nm} coefficients")));
        }
        if self.f1.iter().chain(&self.f2).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::invalid("boundary data must be finite"));
        }
        Ok(())
    }
}

/// Mode-wise ITP solution `U = Σ a_m J_m(k√n r) e^{imθ}`, `V = Σ b_m J_m(kr) e^{imθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItpSolution {
    pub u_coeffs: Vec<C64>,
    pub v_coeffs: Vec<C64>,
    pub norm_u: f64,
    pub norm_v: f64,
    /// Condition numbers of the column-scaled 2×2 matching matrices.
    pub conditions: Vec<f64>,
    /// `(‖U‖ + ‖V‖)/(‖f₁‖_{H^{1/2}} + ‖f₂‖_{H^{−1/2}})`.
    pub stability_ratio: f64,
    /// Largest relative mismatch of the reconstructed traces.
    pub trace_residual: f64,
}

/// Fourier-weighted trace norm `(2πR Σ (1 + m²)^s |f_m|²)^{1/2}`.
pub fn trace_norm(radius: f64, coeffs: &[C64], s: f64) -> f64 {
    let mm = (coeffs.len() / 2) as i64;
    let sum: f64 = (-mm..=mm)
        .zip(coeffs)
        .map(|(m, c)| (1.0 + (m * m) as f64).powf(s) * c.norm_sqr())
        .sum();
    (TAU * radius * sum).sqrt()
}

fn singular_values_2x2(a: [[C64; 2]; 2]) -> (f64, f64) {
    let fro = a.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>();
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    let smax = (0.5 * (fro + disc)).sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    (smax, smin)
}

/// `∫_0^R |J_m(κr)|² r dr` by Gauss–Legendre.
fn radial_l2(radius: f64, kappa: f64, m: usize, nodes: usize) -> f64 {
    let (r, w) = gauss_legendre_on(nodes, 0.0, radius);
    r.iter().zip(&w).map(|(r, w)| w * r * bessel_j_seq(m, kappa * r)[m].powi(2)).sum()
}

/// Radial quadrature nodes used for the ITP norms.
pub const ITP_NORM_NODES: usize = 64;

/// Solves the disk ITP mode by mode.
pub fn itp_solve(spec: &ItpDiskSpec) -> Result<ItpSolution> {
    itp_solve_with_nodes(spec, ITP_NORM_NODES)
}

/// [`itp_solve`] with an explicit number of radial quadrature nodes.
pub fn itp_solve_with_nodes(spec: &ItpDiskSpec, nodes: usize) -> Result<ItpSolution> {
    spec.validate()?;
    let (rr, n, k) = (spec.radius, spec.n, spec.k);
    let mm = spec.cutoff;
    let sq = n.sqrt();
    // Guard against transmission eigenvalues within EIGENVALUE_GUARD of k.
    for m in 0..=mm {
        let lo = determinant(rr, n, m, (k - EIGENVALUE_GUARD).max(0.0));
        let hi = determinant(rr, n, m, k + EIGENVALUE_GUARD);
        let at = determinant(rr, n, m, k);
        if lo * hi <= 0.0 || at == 0.0 {
            let root = if at == 0.0 {
                k
            } else {
                bisect(|x| determinant(rr, n, m, x), k - EIGENVALUE_GUARD, k + EIGENVALUE_GUARD, 0.0)
            };
            return Err(Error::IllPosed { mode: m as i64, k, dist: (root - k).abs() });
        }
    }
    let (a, b) = (k * sq * rr, k * rr);
    let ja = bessel_j_seq(mm + 1, a);
    let jb = bessel_j_seq(mm + 1, b);
    let mut u_coeffs = Vec::with_capacity(2 * mm + 1);
    let mut v_coeffs = Vec::with_capacity(2 * mm + 1);
    let mut conditions = Vec::with_capacity(2 * mm + 1);
    let mut trace_residual: f64 = 0.0;
    let mut nu2 = 0.0;
    let mut nv2 = 0.0;
    let radial: Vec<(f64, f64)> =
        (0..=mm).map(|m| (radial_l2(rr, k * sq, m, nodes), radial_l2(rr, k, m, nodes))).collect();
    for (idx, m) in (-(mm as i64)..=mm as i64).enumerate() {
        let am = m.unsigned_abs() as usize;
        let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
        let (ua, ub) = (ja[am] * sign, jb[am] * sign);
        // J′_m(x) = (m/x) J_m(x) − J_{m+1}(x), written via m/R to stay finite as x → 0.
        let dua = sign * ((am as f64 / rr) * ja[am] - k * sq * ja[am + 1]);
        let dub = sign * ((am as f64 / rr) * jb[am] - k * jb[am + 1]);
        let mat = [[C64::new(ua, 0.0), C64::new(-ub, 0.0)], [C64::new(dua, 0.0), C64::new(-dub, 0.0)]];
        let det = ua * (-dub) + ub * dua;
        let c1 = (ua * ua + dua * dua).sqrt();
        let c2 = (ub * ub + dub * dub).sqrt();
        let scaled = [[mat[0][0] / c1, mat[0][1] / c2], [mat[1][0] / c1, mat[1][1] / c2]];
        let (smax, smin) = singular_values_2x2(scaled);
        conditions.push(if smin > 0.0 { smax / smin } else { f64::INFINITY });
        let (f1, f2) = (spec.f1[idx], spec.f2[idx]);
        let cu = (f1 * (-dub) + ub * f2) / det;
        let cv = (ua * f2 - dua * f1) / det;
        let r1 = cu * ua - cv * ub - f1;
        let r2 = cu * dua - cv * dub - f2;
        let scale1 = f1.norm().max((cu * ua).norm()).max(f64::MIN_POSITIVE);
        let scale2 = f2.norm().max((cu * dua).norm()).max(f64::MIN_POSITIVE);
        trace_residual = trace_residual.max(r1.norm() / scale1).max(r2.norm() / scale2);
        nu2 += cu.norm_sqr() * radial[am].0;
        nv2 += cv.norm_sqr() * radial[am].1;
        u_coeffs.push(cu);
        v_coeffs.push(cv);
    }
    let norm_u = (TAU * nu2).sqrt();
    let norm_v = (TAU * nv2).sqrt();
    let data = trace_norm(rr, &spec.f1, 0.5) + trace_norm(rr, &spec.f2, -0.5);
    let stability_ratio = if data > 0.0 { (norm_u + norm_v) / data } else { 0.0 };
    Ok(ItpSolution { u_coeffs, v_coeffs, norm_u, norm_v, conditions, stability_ratio, trace_residual })
}

// ---------------------------------------------------------------------------
// MITP

/// Angular-mode source term `ρ(r) e^{imθ}` with `ρ` a real polynomial in `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSource {
    pub mode: i64,
    pub coeffs: Vec<f64>,
}

impl ModeSource {
    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }
}

/// Disk MITP specification.
#[derive(Debug, Clone, PartialEq)]
pub struct MitpSpec {
    pub radius: f64,
    pub lambda: f64,
    pub cutoff: usize,
    pub rho1: Vec<ModeSource>,
    pub rho2: Vec<ModeSource>,
    pub f1: Vec<C64>,
    pub f2: Vec<C64>,
    /// Radial finite-difference intervals on `[0, R]`.
    pub intervals: usize,
}

/// Fewest radial intervals accepted by [`mitp_solve`].
pub const MIN_FD_INTERVALS: usize = 32;

/// Mode-wise MITP solution sampled on the radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MitpSolution {
    /// Radial nodes `r_i = iR/N`.
    pub r: Vec<f64>,
    /// `U_m(r_i)` for `m = −M..=M`.
    pub u: Vec<Vec<C64>>,
    pub v: Vec<Vec<C64>>,
    pub u_h1: f64,
    pub v_h1: f64,
    /// `(‖U‖_{H¹} + ‖V‖_{H¹})/(‖ρ₁‖ + ‖ρ₂‖ + ‖f₁‖_{H^{1/2}} + ‖f₂‖_{H^{−1/2}})`.
    pub stability_ratio: f64,
}

/// Particular solution of `u″ + u′/r − (m²/r² + 1)u = ρ` with `u(R) = 0`,
/// regular at the origin, by second-order finite differences.
fn particular(m: usize, radius: f64, intervals: usize, rho: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let n = intervals;
    let dr = radius / n as f64;
    let m2 = (m * m) as f64;
    // Unknowns u_0..u_{n−1}; u_n = 0.
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    if m == 0 {
        // Symmetry u′(0) = 0: u″ + u′/r → 2u″ at the origin.
        b[0] = -4.0 / (dr * dr) - 1.0;
        c[0] = 4.0 / (dr * dr);
        d[0] = rho(0.0);
    } else {
        b[0] = 1.0;
        d[0] = 0.0;
    }
    for i in 1..n {
        let r = i as f64 * dr;
        a[i] = 1.0 / (dr * dr) - 1.0 / (2.0 * r * dr);
        b[i] = -2.0 / (dr * dr) - m2 / (r * r) - 1.0;
        c[i] = 1.0 / (dr * dr) + 1.0 / (2.0 * r * dr);
        d[i] = rho(r);
    }
    let mut u = solve_tridiagonal(&a, &b, &c, &d);
    u.push(0.0);
    u
}

fn source_for(sources: &[ModeSource], m: i64) -> Option<&ModeSource> {
    sources.iter().find(|s| s.mode == m)
}

/// `(‖u‖²_{L²}, ‖∇u‖²_{L²})` of `u(r)e^{imθ}` from grid values, trapezoid in `r`.
fn mode_norms(m: usize, r: &[f64], u: &[C64]) -> (f64, f64) {
    let n = r.len() - 1;
    let dr = r[1] - r[0];
    let m2 = (m * m) as f64;
    let mut l2 = 0.0;
    let mut g2 = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 * dr } else { dr };
        let du = if i == 0 {
            (u[1] * 4.0 - u[2] - u[0] * 3.0) / (2.0 * dr)
        } else if i == n {
            (u[n] * 3.0 - u[n - 1] * 4.0 + u[n - 2]) / (2.0 * dr)
        } else {
            (u[i + 1] - u[i - 1]) / (2.0 * dr)
        };
        let ang = if i == 0 { 0.0 } else { m2 * u[i].norm_sqr() / r[i] };
        l2 += w * r[i] * u[i].norm_sqr();
        g2 += w * (r[i] * du.norm_sqr() + ang);
    }
    (TAU * l2, TAU * g2)
}

/// Solves the disk MITP mode by mode.
pub fn mitp_solve(spec: &MitpSpec) -> Result<MitpSolution> {
    check_radius(spec.radius)?;
    let lam = spec.lambda;
    if !(lam.is_finite() && lam > 0.0) {
        return Err(Error::Physics(alloc::format!("transmission coefficient λ = {lam} must be > 0")));
    }
    if lam == 1.0 {
        return Err(Error::invalid("the modified interior transmission problem requires λ ≠ 1"));
    }
    let mm = spec.cutoff;
    if mm as i32 > MAX_ORDER_MODIFIED {
        return Err(Error::OutOfRange("mode cutoff exceeds the supported modified-Bessel order".into()));
    }
    let nm = 2 * mm + 1;
    if spec.f1.len() != nm || spec.f2.len() != nm {
        return Err(Error::invalid(alloc::format!("boundary data must have 2M+1 = {nm} coefficients")));
    }
    for s in spec.rho1.iter().chain(&spec.rho2) {
        if s.mode.unsigned_abs() as usize > mm {
            return Err(Error::invalid(alloc::format!("source mode {} exceeds the cutoff", s.mode)));
        }
    }
    let n = spec.intervals;
    if n < MIN_FD_INTERVALS || n < 8 * (mm + 1) {
        return Err(Error::Accuracy(alloc::format!(
            "{n} radial intervals are too coarse; need at least max({MIN_FD_INTERVALS}, 8(M+1))"
        )));
    }
    let rr = spec.radius;
    let dr = rr / n as f64;
    let r: Vec<f64> = (0..=n).map(|i| i as f64 * dr).collect();
    let i_r = bessel_i_seq(mm + 1, rr);

    let modes: Vec<i64> = (-(mm as i64)..=mm as i64).collect();
    let solved: Vec<(Vec<C64>, Vec<C64>, f64, f64, f64, f64)> = crate::par::map(nm, |idx| {
        let m = modes[idx];
        let am = m.unsigned_abs() as usize;
        let p = |src: Option<&ModeSource>| -> Vec<f64> {
            match src {
                Some(s) => particular(am, rr, n, &|x| s.eval(x)),
                None => vec![0.0; n + 1],
            }
        };
        let p1 = p(source_for(&spec.rho1, m));
        let p2 = p(source_for(&spec.rho2, m));
        let dp = |u: &[f64]| (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * dr);
        // I′_m/I_m at R from I′_m = I_{m+1} + (m/x) I_m.
        let log_d = i_r[am + 1] / i_r[am] + am as f64 / rr;
        // a − b = f₁,  λ(p₁′ + aL) − (p₂′ + bL) = f₂.
        let (f1, f2) = (spec.f1[idx], spec.f2[idx]);
        let rhs2 = f2 - lam * dp(&p1) + dp(&p2);
        let a = (rhs2 - f1 * log_d) / ((lam - 1.0) * log_d);
        let b = a - f1;
        let basis: Vec<f64> = r.iter().map(|&x| bessel_i_seq(am, x)[am] / i_r[am]).collect();
        let u: Vec<C64> = p1.iter().zip(&basis).map(|(p, q)| a * q + p).collect();
        let v: Vec<C64> = p2.iter().zip(&basis).map(|(p, q)| b * q + p).collect();
        let (ul2, ug2) = mode_norms(am, &r, &u);
        let (vl2, vg2) = mode_norms(am, &r, &v);
        (u, v, ul2, ug2, vl2, vg2)
    });
    let mut u = Vec::with_capacity(nm);
    let mut v = Vec::with_capacity(nm);
    let (mut u2, mut v2) = (0.0, 0.0);
    for (uu, vv, ul2, ug2, vl2, vg2) in solved {
        u2 += ul2 + ug2;
        v2 += vl2 + vg2;
        u.push(uu);
        v.push(vv);
    }
    let u_h1 = u2.sqrt();
    let v_h1 = v2.sqrt();
    let rho_norm = |src: &[ModeSource]| -> f64 {
        let (q, w) = gauss_legendre_on(32, 0.0, rr);
        let s: f64 = src
            .iter()
            .map(|s| q.iter().zip(&w).map(|(x, w)| w * x * s.eval(*x).powi(2)).sum::<f64>())
            .sum();
        (TAU * s).sqrt()
    };
    let data = rho_norm(&spec.rho1)
        + rho_norm(&spec.rho2)
        + trace_norm(rr, &spec.f1, 0.5)
        + trace_norm(rr, &spec.f2, -0.5);
    let stability_ratio = if data > 0.0 { (u_h1 + v_h1) / data } else { 0.0 };
    Ok(MitpSolution { r, u, v, u_h1, v_h1, stability_ratio })
}

/// MITP data used by the `λ → 1` sweep: `ρ₁ = 1`, `ρ₂ = 0`, `f₁ = 0`,
/// `f₂ = 1` (mode 0 only).
pub fn sweep_spec(radius: f64, lambda: f64, cutoff: usize, intervals: usize) -> MitpSpec {
    let nm = 2 * cutoff + 1;
    let mut f2 = vec![C64::new(0.0, 0.0); nm];
    f2[cutoff] = C64::new(1.0, 0.0);
    MitpSpec {
        radius,
        lambda,
        cutoff,
        rho1: vec![ModeSource { mode: 0, coeffs: vec![1.0] }],
        rho2: Vec::new(),
        f1: vec![C64::new(0.0, 0.0); nm],
        f2,
        intervals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda1_of_unit_disk() {
        let l = dirichlet_lambda1(1.0).unwrap();
        assert!((l - 5.783185962946784).abs() < 1e-8);
        assert_eq!(dirichlet_lambda1(0.5).unwrap(), 4.0 * l);
    }

    #[test]
    fn determinant_small_k_series() {
        // d_m ≈ (AB)^m (A² − B²) / (R 2^{2m+1} m! (m+1)!).
        let (rr, n, k) = (1.0, 4.0, 1e-3);
        for m in 0..4usize {
            let a = k * n.sqrt() * rr;
            let b = k * rr;
            let fact = |j: usize| (1..=j).map(|i| i as f64).product::<f64>();
            let lead = (a * b).powi(m as i32) * (a * a - b * b)
                / (rr * 2f64.powi(2 * m as i32 + 1) * fact(m) * fact(m + 1));
            let d = te_determinant(rr, n, m as i64, k).unwrap();
            assert!((d - lead).abs() < 1e-5 * lead.abs(), "m={m}: {d} vs {lead}");
        }
    }
}
