//! Lippmann–Schwinger volume equation for `λ = 1`:
//!
//! ```text
//! v(x) + k² ∫_D Φ(x, y) m(y) v(y) dy = uⁱ(x),   m = 1 − n.
//! ```
//!
//! The scattered part `w = v − uⁱ` is the volume potential
//! `w = −k² ∫_D Φ m v`, which is C¹ across ∂D. It is collocated at the
//! centres of a uniform `M × M` grid covering `D`. Each cell carries the
//! zeroth and first moments of `m v` over `cell ∩ D`; the kernel is the
//! cell average of `Φ` and of `∇Φ`, so the discrete operator is a
//! convolution applied by FFT and the system is solved by GMRES.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{check_source_outside, Diagnostics, FieldSolution, MediumSpec, Representation, SolverTag};
use crate::error::{Error, Result};
use crate::fft::{fft2, Fft};
use crate::geometry::{Containment, InsideTester, ParamCurve};
use crate::layer::farfield_constant;
use crate::linalg::gmres;
use crate::math::{cis, CVec2, Vec2, C64, EULER_GAMMA, I, TAU};
use crate::quadrature::gauss_legendre;
use crate::special::{hankel01, IncidentField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsOptions {
    /// Grid points per side; a power of two.
    pub grid: usize,
    /// Coarse grids are an error instead of a warning.
    pub strict: bool,
    /// Relative GMRES residual.
    pub tol: f64,
}

impl Default for LsOptions {
    fn default() -> Self {
        LsOptions { grid: 64, strict: false, tol: 1e-12 }
    }
}

/// Minimum grid points per interior wavelength.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 8.0;
/// Cells whose centres are closer than this many cell widths use the
/// numerically integrated kernel.
const NEAR: i64 = 6;
/// Depth of the adaptive cell integration near a point source.
const MAX_DEPTH: u32 = 6;

/// Uniform grid over the padded bounding square of the obstacle.
#[derive(Debug, Clone)]
pub struct VolumeGrid {
    pub m: usize,
    pub h: f64,
    /// Centre of cell `(0, 0)`.
    pub origin: Vec2,
}

impl VolumeGrid {
    fn new(curve: &ParamCurve, m: usize) -> Self {
        let (lo, hi) = curve.bounding_box();
        let side = (hi.x - lo.x).max(hi.y - lo.y);
        // Two spare cells on each side keep centred differences inside the grid.
        let h = side / (m as f64 - 4.0 - 1e-9);
        let c = (lo + hi) * 0.5;
        let half = 0.5 * (m as f64 - 1.0) * h;
        VolumeGrid { m, h, origin: c - Vec2::new(half, half) }
    }

    pub fn center(&self, p: usize, q: usize) -> Vec2 {
        self.origin + Vec2::new(p as f64 * self.h, q as f64 * self.h)
    }

    fn index(&self, p: usize, q: usize) -> usize {
        p * self.m + q
    }
}

/// Cell moments of the contrast over `cell ∩ D`, divided by `h²`.
#[derive(Debug, Clone, Copy, Default)]
struct CellMoments {
    mu0: C64,
    mu1: [C64; 2],
    mu2: [[C64; 2]; 2],
}

// ---------------------------------------------------------------------------
// polygon clipping and moments

fn clip(poly: &[Vec2], lo: Vec2, hi: Vec2) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = poly.to_vec();
    for edge in 0..4 {
        if out.is_empty() {
            break;
        }
        let inside = |p: Vec2| match edge {
            0 => p.x >= lo.x,
            1 => p.x <= hi.x,
            2 => p.y >= lo.y,
            _ => p.y <= hi.y,
        };
        let cut = |a: Vec2, b: Vec2| {
            let s = match edge {
                0 => (lo.x - a.x) / (b.x - a.x),
                1 => (hi.x - a.x) / (b.x - a.x),
                2 => (lo.y - a.y) / (b.y - a.y),
                _ => (hi.y - a.y) / (b.y - a.y),
            };
            a + (b - a) * s
        };
        let input = core::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            match (inside(prev), inside(cur)) {
                (true, true) => out.push(cur),
                (true, false) => out.push(cut(prev, cur)),
                (false, true) => {
                    out.push(cut(prev, cur));
                    out.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    out
}

/// Area, first and second moments of a polygon about `c`.
fn polygon_moments(poly: &[Vec2], c: Vec2) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let n = poly.len();
    let (mut a, mut mx, mut my, mut mxx, mut myy, mut mxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let p = poly[i] - c;
        let q = poly[(i + 1) % n] - c;
        let cr = p.x * q.y - q.x * p.y;
        a += cr;
        mx += (p.x + q.x) * cr;
        my += (p.y + q.y) * cr;
        mxx += (p.x * p.x + p.x * q.x + q.x * q.x) * cr;
        myy += (p.y * p.y + p.y * q.y + q.y * q.y) * cr;
        mxy += (p.x * q.y + 2.0 * p.x * p.y + 2.0 * q.x * q.y + q.x * p.y) * cr;
    }
    (
        a / 2.0,
        [mx / 6.0, my / 6.0],
        [[mxx / 12.0, mxy / 24.0], [mxy / 24.0, myy / 12.0]],
    )
}

// ---------------------------------------------------------------------------
// cell-averaged kernel

/// `∫∫ ln(x² + y²) dx dy`.
fn log_antiderivative(x: f64, y: f64) -> f64 {
    let mut f = -3.0 * x * y;
    if x != 0.0 && y != 0.0 {
        f += x * y * (x * x + y * y).ln();
    }
    if x != 0.0 {
        f += x * x * (y / x).atan();
    }
    if y != 0.0 {
        f += y * y * (x / y).atan();
    }
    f
}

/// `∫ ln(a² + t²) dt`.
fn log_line_antiderivative(a: f64, t: f64) -> f64 {
    let mut f = -2.0 * t;
    if a != 0.0 || t != 0.0 {
        f += t * (a * a + t * t).ln();
    }
    if a != 0.0 {
        f += 2.0 * a * (t / a).atan();
    }
    f
}

/// `Φ(r) + ln(r)/2π`, smooth up to `r² ln r` terms.
fn phi_regular(k: f64, r: f64) -> C64 {
    if r == 0.0 {
        return C64::new(-((0.5 * k).ln() + EULER_GAMMA) / TAU, 0.25);
    }
    let (h0, _) = hankel01(k * r);
    I * 0.25 * h0 + r.ln() / TAU
}

struct KernelRule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl KernelRule {
    fn new() -> Self {
        let (x, w) = gauss_legendre(16);
        KernelRule { x, w }
    }

    /// Average of `Φ(|y|)` over `[x1,x2]×[y1,y2]` and of `∇Φ`.
    fn rect(&self, k: f64, x1: f64, x2: f64, y1: f64, y2: f64) -> (C64, CVec2) {
        let area = (x2 - x1) * (y2 - y1);
        let (cx, hx) = (0.5 * (x1 + x2), 0.5 * (x2 - x1));
        let (cy, hy) = (0.5 * (y1 + y2), 0.5 * (y2 - y1));
        let mut reg = C64::new(0.0, 0.0);
        for (a, wa) in self.x.iter().zip(&self.w) {
            for (b, wb) in self.x.iter().zip(&self.w) {
                let r = Vec2::new(cx + hx * a, cy + hy * b).norm();
                reg += phi_regular(k, r) * (wa * wb);
            }
        }
        reg *= hx * hy;
        let logint = 0.5
            * (log_antiderivative(x2, y2) - log_antiderivative(x1, y2) - log_antiderivative(x2, y1)
                + log_antiderivative(x1, y1));
        let value = (reg - logint / TAU) / area;
        // ∫ ∂_x Φ = ∫ Φ(x₂, t) − Φ(x₁, t) dt, and likewise in y.
        let edge = |a: f64, t1: f64, t2: f64, swap: bool| -> C64 {
            let (c, hl) = (0.5 * (t1 + t2), 0.5 * (t2 - t1));
            let mut s = C64::new(0.0, 0.0);
            for (u, wu) in self.x.iter().zip(&self.w) {
                let t = c + hl * u;
                let r = if swap { Vec2::new(t, a) } else { Vec2::new(a, t) }.norm();
                s += phi_regular(k, r) * *wu;
            }
            s * hl - 0.5 * (log_line_antiderivative(a, t2) - log_line_antiderivative(a, t1)) / TAU
        };
        let gx = (edge(x2, y1, y2, false) - edge(x1, y1, y2, false)) / area;
        let gy = (edge(y2, x1, x2, true) - edge(y1, x1, x2, true)) / area;
        (value, CVec2::new(gx, gy))
    }
}

/// Cell average of `Φ` and `∇Φ` over the cell of width `h` centred at `d`.
fn cell_average(rule: &KernelRule, k: f64, h: f64, d: Vec2) -> (C64, CVec2) {
    let r = d.norm();
    if r > (NEAR as f64 + 0.5) * h {
        let (h0, h1) = hankel01(k * r);
        let s = 1.0 - k * k * h * h / 24.0;
        let phi = I * 0.25 * h0 * s;
        let g = CVec2::scaled(d, -I * (0.25 * k / r) * h1 * s);
        return (phi, g);
    }
    let hh = 0.5 * h;
    rule.rect(k, d.x - hh, d.x + hh, d.y - hh, d.y + hh)
}

// ---------------------------------------------------------------------------
// incident moments

/// Zeroth and first moments of `m uⁱ` over `S ∩ D` (square `S` of half width
/// `a` about `s`), relative to the cell centre `c`.
fn incident_moments(
    piece: Option<&[Vec2]>,
    s: Vec2,
    a: f64,
    c: Vec2,
    depth: u32,
    ctx: &IncidentCtx<'_>,
) -> Result<(C64, [C64; 2])> {
    if let Some(p) = piece {
        if p.len() < 3 {
            return Ok((C64::new(0.0, 0.0), [C64::new(0.0, 0.0); 2]));
        }
    }
    let near = ctx.source.is_some_and(|z| {
        let dx = ((z.x - s.x).abs() - a).max(0.0);
        let dy = ((z.y - s.y).abs() - a).max(0.0);
        dx.hypot(dy) < 2.0 * a
    });
    if near && depth < MAX_DEPTH {
        let mut m0 = C64::new(0.0, 0.0);
        let mut m1 = [C64::new(0.0, 0.0); 2];
        for (ox, oy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let sc = s + Vec2::new(ox * 0.5 * a, oy * 0.5 * a);
            let lo = sc - Vec2::new(0.5 * a, 0.5 * a);
            let hi = sc + Vec2::new(0.5 * a, 0.5 * a);
            let sub = piece.map(|p| clip(p, lo, hi));
            let (a0, a1) = incident_moments(sub.as_deref(), sc, 0.5 * a, c, depth + 1, ctx)?;
            m0 += a0;
            m1[0] += a1[0];
            m1[1] += a1[1];
        }
        return Ok((m0, m1));
    }
    let mut m0 = C64::new(0.0, 0.0);
    let mut m1 = [C64::new(0.0, 0.0); 2];
    let mut add = |y: Vec2, w: f64| -> Result<()> {
        let f = ctx.medium_contrast(y) * ctx.incident.value(ctx.k, y)? * w;
        m0 += f;
        m1[0] += f * (y.x - c.x);
        m1[1] += f * (y.y - c.y);
        Ok(())
    };
    match piece {
        None => {
            for (u, wu) in ctx.gl.x.iter().zip(&ctx.gl.w) {
                for (v, wv) in ctx.gl.x.iter().zip(&ctx.gl.w) {
                    add(s + Vec2::new(a * u, a * v), wu * wv * a * a)?;
                }
            }
        }
        Some(p) => {
            // Fan from the vertex mean; all triangles lie in the square.
            let n = p.len();
            let o = p.iter().fold(Vec2::new(0.0, 0.0), |acc, v| acc + *v) * (1.0 / n as f64);
            for i in 0..n {
                let (b, cc) = (p[i], p[(i + 1) % n]);
                let area = 0.5 * ((b - o).cross(cc - o));
                if area == 0.0 {
                    continue;
                }
                for (bary, w) in TRIANGLE_RULE.iter() {
                    let y = o * bary[0] + b * bary[1] + cc * bary[2];
                    add(y, w * area)?;
                }
            }
        }
    }
    Ok((m0, m1))
}

/// Degree-4 rule on the reference triangle, barycentric nodes and weights summing to 1.
const TRIANGLE_RULE: [([f64; 3], f64); 6] = [
    ([0.108103018168070, 0.445948490915965, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.108103018168070, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.445948490915965, 0.108103018168070], 0.223381589678011),
    ([0.816847572980459, 0.091576213509771, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.816847572980459, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.091576213509771, 0.816847572980459], 0.109951743655322),
];

struct Gl4 {
    x: Vec<f64>,
    w: Vec<f64>,
}

struct IncidentCtx<'a> {
    k: f64,
    incident: &'a IncidentField,
    medium: &'a MediumSpec,
    source: Option<Vec2>,
    gl: Gl4,
}

impl IncidentCtx<'_> {
    fn medium_contrast(&self, y: Vec2) -> C64 {
        C64::new(1.0, 0.0) - self.medium.n.eval(y)
    }
}

// ---------------------------------------------------------------------------
// solver

/// Discretised volume operator for one obstacle, medium and grid.
pub struct LsOperator {
    curve: ParamCurve,
    tester: InsideTester,
    medium: MediumSpec,
    grid: VolumeGrid,
    plan: Fft,
    /// Spectra of the padded kernels `G`, `∂ₓG`, `∂ᵧG`.
    spectra: [Vec<C64>; 3],
    cells: Vec<CellMoments>,
    /// Boundary polygon pieces of the cut cells, by cell index.
    pieces: Vec<Option<Vec<Vec2>>>,
    inside: Vec<bool>,
    warnings: Vec<String>,
}

impl core::fmt::Debug for LsOperator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LsOperator").field("grid", &self.grid).field("medium", &self.medium).finish()
    }
}

impl LsOperator {
    pub fn new(curve: &ParamCurve, medium: &MediumSpec, options: LsOptions) -> Result<Self> {
        if medium.lambda != 1.0 {
            return Err(Error::invalid(
                "the volume equation needs λ = 1; use bie_solve or sov_solve for λ ≠ 1",
            ));
        }
        let m = options.grid;
        if !m.is_power_of_two() || m < 16 {
            return Err(Error::invalid("volume grid size must be a power of two and at least 16"));
        }
        let k = medium.k;
        let grid = VolumeGrid::new(curve, m);
        let h = grid.h;
        let tester = InsideTester::new(curve);

        // Fine polygon of the boundary and the cells it crosses.
        let np = (64 * m).max(4096);
        let poly: Vec<Vec2> = (0..np).map(|i| curve.point(TAU * i as f64 / np as f64)).collect();
        let mut cut = vec![false; m * m];
        let cell_of = |p: Vec2| -> (i64, i64) {
            let u = (p - grid.origin) * (1.0 / h);
            ((u.x + 0.5).floor() as i64, (u.y + 0.5).floor() as i64)
        };
        for p in &poly {
            let (a, b) = cell_of(*p);
            for da in -1..=1 {
                for db in -1..=1 {
                    let (pa, pb) = (a + da, b + db);
                    if pa >= 0 && pb >= 0 && (pa as usize) < m && (pb as usize) < m {
                        cut[grid.index(pa as usize, pb as usize)] = true;
                    }
                }
            }
        }

        let results: Vec<(CellMoments, Option<Vec<Vec2>>, bool)> = crate::par::map(m * m, |idx| {
            let (p, q) = (idx / m, idx % m);
            let c = grid.center(p, q);
            let mut cm = CellMoments::default();
            if cut[idx] {
                let hh = Vec2::new(0.5 * h, 0.5 * h);
                let piece = clip(&poly, c - hh, c + hh);
                let (area, m1, m2) = if piece.len() >= 3 {
                    polygon_moments(&piece, c)
                } else {
                    (0.0, [0.0; 2], [[0.0; 2]; 2])
                };
                if area <= 1e-14 * h * h {
                    return (cm, None, false);
                }
                let centroid = c + Vec2::new(m1[0] / area, m1[1] / area);
                let contrast = C64::new(1.0, 0.0) - medium.n.eval(centroid);
                let s = contrast / (h * h);
                cm.mu0 = s * area;
                cm.mu1 = [s * m1[0], s * m1[1]];
                cm.mu2 = [[s * m2[0][0], s * m2[0][1]], [s * m2[1][0], s * m2[1][1]]];
                (cm, Some(piece), true)
            } else if tester.is_inside(c) {
                cm.mu0 = C64::new(1.0, 0.0) - medium.n.eval(c);
                (cm, None, true)
            } else {
                (cm, None, false)
            }
        });
        let mut cells = Vec::with_capacity(m * m);
        let mut pieces = Vec::with_capacity(m * m);
        let mut inside = Vec::with_capacity(m * m);
        let mut sup_n: f64 = 0.0;
        for (idx, (cm, piece, ins)) in results.into_iter().enumerate() {
            if ins {
                let c = grid.center(idx / m, idx % m);
                let n = medium.n.eval(c);
                super::medium::check_index(n)?;
                sup_n = sup_n.max(n.norm());
            }
            cells.push(cm);
            pieces.push(piece);
            inside.push(ins);
        }

        let mut warnings = Vec::new();
        let ppw = TAU / (k * sup_n.max(1.0).sqrt()) / h;
        if ppw < MIN_POINTS_PER_WAVELENGTH {
            let msg = alloc::format!(
                "volume grid resolves the interior wavelength with {ppw:.1} points (< {MIN_POINTS_PER_WAVELENGTH})"
            );
            if options.strict {
                return Err(Error::Accuracy(msg));
            }
            warnings.push(msg);
        }

        // Padded kernels on a 2M × 2M torus.
        let nn = 2 * m;
        let rule = KernelRule::new();
        let offs: Vec<(C64, CVec2)> = crate::par::map(nn * nn, |idx| {
            let (a, b) = (idx / nn, idx % nn);
            let wrap = |v: usize| if v >= m { v as i64 - nn as i64 } else { v as i64 };
            let (pa, pb) = (wrap(a), wrap(b));
            if pa.unsigned_abs() as usize >= m || pb.unsigned_abs() as usize >= m {
                return (C64::new(0.0, 0.0), CVec2::default());
            }
            cell_average(&rule, k, h, Vec2::new(pa as f64 * h, pb as f64 * h))
        });
        let plan = Fft::new(nn);
        let mut spectra = [
            offs.iter().map(|o| o.0).collect::<Vec<_>>(),
            offs.iter().map(|o| o.1.x).collect::<Vec<_>>(),
            offs.iter().map(|o| o.1.y).collect::<Vec<_>>(),
        ];
        for s in spectra.iter_mut() {
            fft2(&plan, s, false);
        }
        Ok(LsOperator {
            curve: curve.clone(),
            tester,
            medium: medium.clone(),
            grid,
            plan,
            spectra,
            cells,
            pieces,
            inside,
            warnings,
        })
    }

    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    /// `h² Σ_c′ [G(c − c′) q₀ − ∇G(c − c′)·q₁]` on the grid.
    fn convolve(&self, q0: &[C64], q1x: &[C64], q1y: &[C64]) -> Vec<C64> {
        let m = self.grid.m;
        let nn = 2 * m;
        let mut acc = vec![C64::new(0.0, 0.0); nn * nn];
        for (slot, (src, sign)) in [(q0, 1.0), (q1x, -1.0), (q1y, -1.0)].into_iter().enumerate() {
            if src.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                continue;
            }
            let mut buf = vec![C64::new(0.0, 0.0); nn * nn];
            for p in 0..m {
                buf[p * nn..p * nn + m].copy_from_slice(&src[p * m..(p + 1) * m]);
            }
            fft2(&self.plan, &mut buf, false);
            for ((a, b), s) in acc.iter_mut().zip(&buf).zip(&self.spectra[slot]) {
                *a += b * s * sign;
            }
        }
        fft2(&self.plan, &mut acc, true);
        let scale = self.grid.h * self.grid.h / (nn * nn) as f64;
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for p in 0..m {
            for q in 0..m {
                out[p * m + q] = acc[p * nn + q] * scale;
            }
        }
        out
    }

    /// Centred differences of a grid function.
    fn gradient(&self, w: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let m = self.grid.m;
        let h2 = 2.0 * self.grid.h;
        let mut gx = vec![C64::new(0.0, 0.0); m * m];
        let mut gy = vec![C64::new(0.0, 0.0); m * m];
        for p in 1..m - 1 {
            for q in 1..m - 1 {
                let i = p * m + q;
                gx[i] = (w[i + m] - w[i - m]) / h2;
                gy[i] = (w[i + 1] - w[i - 1]) / h2;
            }
        }
        (gx, gy)
    }

    /// Moments `(q₀, q₁)` of `m w` from the grid values of `w`.
    fn moments_of(&self, w: &[C64]) -> [Vec<C64>; 3] {
        let (gx, gy) = self.gradient(w);
        let n = w.len();
        let mut q0 = vec![C64::new(0.0, 0.0); n];
        let mut q1x = vec![C64::new(0.0, 0.0); n];
        let mut q1y = vec![C64::new(0.0, 0.0); n];
        for (i, c) in self.cells.iter().enumerate() {
            if c.mu0 == C64::new(0.0, 0.0) && c.mu1 == [C64::new(0.0, 0.0); 2] {
                continue;
            }
            q0[i] = c.mu0 * w[i] + c.mu1[0] * gx[i] + c.mu1[1] * gy[i];
            q1x[i] = c.mu1[0] * w[i] + c.mu2[0][0] * gx[i] + c.mu2[0][1] * gy[i];
            q1y[i] = c.mu1[1] * w[i] + c.mu2[1][0] * gx[i] + c.mu2[1][1] * gy[i];
        }
        [q0, q1x, q1y]
    }

    fn incident_moments(&self, incident: &IncidentField) -> Result<[Vec<C64>; 3]> {
        let m = self.grid.m;
        let h = self.grid.h;
        let (g, w) = gauss_legendre(4);
        let ctx = IncidentCtx { k: self.medium.k, incident, medium: &self.medium, source: incident.source(), gl: Gl4 { x: g, w } };
        let res: Vec<Result<(C64, [C64; 2])>> = crate::par::map(m * m, |idx| {
            if !self.inside[idx] {
                return Ok((C64::new(0.0, 0.0), [C64::new(0.0, 0.0); 2]));
            }
            let c = self.grid.center(idx / m, idx % m);
            incident_moments(self.pieces[idx].as_deref(), c, 0.5 * h, c, 0, &ctx)
        });
        let s = 1.0 / (h * h);
        let mut q0 = vec![C64::new(0.0, 0.0); m * m];
        let mut q1x = vec![C64::new(0.0, 0.0); m * m];
        let mut q1y = vec![C64::new(0.0, 0.0); m * m];
        for (i, r) in res.into_iter().enumerate() {
            let (a, b) = r?;
            q0[i] = a * s;
            q1x[i] = b[0] * s;
            q1y[i] = b[1] * s;
        }
        Ok([q0, q1x, q1y])
    }

    /// Solves for one incident field.
    pub fn solve(&self, incident: &IncidentField, options: LsOptions) -> Result<LsSolution> {
        check_source_outside(incident, |z| self.tester.classify(z))?;
        if let Some(z) = incident.source() {
            let t = self.curve.closest_parameter(z);
            let dist = (self.curve.point(t) - z).norm();
            if dist < self.grid.h / (1u32 << MAX_DEPTH) as f64 {
                return Err(Error::Accuracy(alloc::format!(
                    "source at distance {dist:.3e} from ∂D is below the volume-grid resolution h/64 = {:.3e}; refine the grid",
                    self.grid.h / 64.0
                )));
            }
        }
        let k2 = self.medium.k * self.medium.k;
        let qi = self.incident_moments(incident)?;
        let rhs: Vec<C64> = self.convolve(&qi[0], &qi[1], &qi[2]).iter().map(|v| -v * k2).collect();
        let apply = |w: &[C64]| -> Vec<C64> {
            let q = self.moments_of(w);
            let c = self.convolve(&q[0], &q[1], &q[2]);
            w.iter().zip(&c).map(|(a, b)| a + b * k2).collect()
        };
        let (w, residual) = gmres(apply, &rhs, None, options.tol, 80, 2000)?;
        let qw = self.moments_of(&w);
        let q = [0, 1, 2].map(|i| qw[i].iter().zip(&qi[i]).map(|(a, b)| a + b).collect::<Vec<_>>());
        let (gx, gy) = self.gradient(&w);
        Ok(LsSolution {
            k: self.medium.k,
            grid: self.grid.clone(),
            incident: *incident,
            w,
            gx,
            gy,
            q,
            inside: self.inside.clone(),
            residual,
            tester: self.tester.clone(),
            warnings: self.warnings.clone(),
        })
    }
}

/// Grid solution of the volume equation.
#[derive(Debug, Clone)]
pub struct LsSolution {
    k: f64,
    grid: VolumeGrid,
    incident: IncidentField,
    /// `w = v − uⁱ` at the cell centres, including cells outside `D`.
    w: Vec<C64>,
    gx: Vec<C64>,
    gy: Vec<C64>,
    /// Moments of `m v` per cell, divided by `h²`.
    q: [Vec<C64>; 3],
    inside: Vec<bool>,
    residual: f64,
    tester: InsideTester,
    warnings: Vec<String>,
}

impl LsSolution {
    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `w` at cell centres (row `p` along x, column `q` along y).
    pub fn grid_values(&self) -> &[C64] {
        &self.w
    }

    /// Whether cell `idx` meets `D`.
    pub fn cell_in_domain(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    /// `w = −k² ∫_D Φ(x, y) m v dy` and its gradient, summed directly.
    pub fn volume_potential(&self, x: Vec2) -> (C64, CVec2) {
        let m = self.grid.m;
        let h = self.grid.h;
        let k = self.k;
        let rule = KernelRule::new();
        let mut u = C64::new(0.0, 0.0);
        let mut g = CVec2::default();
        let h2 = h * h;
        for i in 0..m * m {
            let (q0, q1x, q1y) = (self.q[0][i], self.q[1][i], self.q[2][i]);
            if q0 == C64::new(0.0, 0.0) && q1x == C64::new(0.0, 0.0) && q1y == C64::new(0.0, 0.0) {
                continue;
            }
            let d = x - self.grid.center(i / m, i % m);
            let (phi, gphi) = cell_average(&rule, k, h, d);
            u += (phi * q0 - gphi.x * q1x - gphi.y * q1y) * h2;
            // The Hessian term of q₁ is dropped: q₁ is O(h) and lives on cut cells.
            g = g + gphi * (q0 * h2);
        }
        (u * -(k * k), g * -(k * k))
    }

    /// Bilinear interpolation of `w` and its centred-difference gradient.
    pub fn interpolate(&self, x: Vec2) -> (C64, CVec2) {
        let m = self.grid.m;
        let u = (x - self.grid.origin) * (1.0 / self.grid.h);
        let p = (u.x.floor() as i64).clamp(0, m as i64 - 2) as usize;
        let q = (u.y.floor() as i64).clamp(0, m as i64 - 2) as usize;
        let (s, t) = (u.x - p as f64, u.y - q as f64);
        let at = |f: &[C64]| {
            let i = p * m + q;
            f[i] * ((1.0 - s) * (1.0 - t)) + f[i + m] * (s * (1.0 - t)) + f[i + 1] * ((1.0 - s) * t) + f[i + m + 1] * (s * t)
        };
        (at(&self.w), CVec2::new(at(&self.gx), at(&self.gy)))
    }

    /// Interior field `v = uⁱ + w` from the interpolated grid values.
    pub fn interior_interpolated(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let (ui, gi) = self.incident.eval(self.k, x)?;
        let (w, gw) = self.interpolate(x);
        Ok((ui + w, gi + gw))
    }

    pub fn far_field_samples(&self, count: usize) -> Vec<C64> {
        let m = self.grid.m;
        let k = self.k;
        let pre = -farfield_constant(k) * (k * k * self.grid.h * self.grid.h);
        (0..count)
            .map(|j| {
                let th = TAU * j as f64 / count as f64;
                let xh = Vec2::polar(1.0, th);
                let mut s = C64::new(0.0, 0.0);
                for i in 0..m * m {
                    let (q0, q1x, q1y) = (self.q[0][i], self.q[1][i], self.q[2][i]);
                    if q0 == C64::new(0.0, 0.0) && q1x == C64::new(0.0, 0.0) && q1y == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let c = self.grid.center(i / m, i % m);
                    s += (q0 - I * k * (q1x * xh.x + q1y * xh.y)) * cis(-k * xh.dot(c));
                }
                s * pre
            })
            .collect()
    }
}

struct LsField {
    sol: Arc<LsSolution>,
}

impl Representation for LsField {
    fn region(&self, x: Vec2) -> Containment {
        self.sol.tester.classify(x)
    }

    fn scattered(&self, x: Vec2) -> Result<(C64, CVec2)> {
        Ok(self.sol.volume_potential(x))
    }

    fn interior(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let (ui, gi) = self.sol.incident.eval(self.sol.k, x)?;
        let (w, gw) = self.sol.volume_potential(x);
        Ok((ui + w, gi + gw))
    }

    fn far_field(&self, m: usize) -> Result<Vec<C64>> {
        Ok(self.sol.far_field_samples(m))
    }
}

/// Wraps a grid solution into an evaluable field.
pub fn ls_field(sol: LsSolution, medium: &MediumSpec) -> FieldSolution {
    let diagnostics = Diagnostics {
        residual: sol.residual,
        warnings: sol.warnings.clone(),
        ..Default::default()
    };
    let incident = sol.incident;
    FieldSolution::new(SolverTag::Ls, medium.clone(), incident, diagnostics, Box::new(LsField { sol: Arc::new(sol) }))
}

/// Solves the volume equation for `λ = 1` on the region bounded by `curve`.
pub fn ls_solve(
    curve: &ParamCurve,
    medium: &MediumSpec,
    incident: &IncidentField,
    options: LsOptions,
) -> Result<FieldSolution> {
    let op = LsOperator::new(curve, medium, options)?;
    let sol = op.solve(incident, options)?;
    Ok(ls_field(sol, medium))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    #[test]
    fn self_cell_log_integral() {
        let a = 0.3;
        let f = |x, y| log_antiderivative(x, y);
        let exact = 4.0 * a * a * ((2.0 * a * a).ln() - 3.0 + PI / 2.0);
        let v = f(a, a) - f(-a, a) - f(a, -a) + f(-a, -a);
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn near_and_far_kernel_agree() {
        let rule = KernelRule::new();
        let (k, h) = (1.3, 0.05);
        let d = Vec2::new(7.0 * h, 2.0 * h);
        let (a, ga) = rule.rect(k, d.x - h / 2.0, d.x + h / 2.0, d.y - h / 2.0, d.y + h / 2.0);
        let (b, gb) = cell_average(&rule, k, h, d * 1.0000001);
        assert!((a - b).norm() < 1e-6 * a.norm());
        assert!((ga.x - gb.x).norm() < 1e-5 * ga.x.norm());
    }

    #[test]
    fn polygon_moments_of_square() {
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(2.0, 2.0), Vec2::new(0.0, 2.0)];
        let (a, m1, m2) = polygon_moments(&sq, Vec2::new(1.0, 1.0));
        assert!((a - 4.0).abs() < 1e-14);
        assert!(m1[0].abs() < 1e-14 && m1[1].abs() < 1e-14);
        assert!((m2[0][0] - 4.0 / 3.0).abs() < 1e-14 && m2[0][1].abs() < 1e-14);
    }
}
