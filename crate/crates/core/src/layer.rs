//! Nyström discretisation of the boundary operators and evaluation of the
//! layer potentials off the boundary.
//!
//! Every kernel on the grid is split as
//! `M₁(t,τ) ln(4 sin²((t−τ)/2)) + M₂(t,τ)`; the logarithmic part is
//! integrated with the product weights [`log_weights`] and the smooth part
//! with the trapezoidal rule. The hypersingular operator `T` only appears
//! as the difference `T₁ − T`, whose `1/r²` parts cancel analytically: each
//! wave number contributes a kernel built from `Y_1 + 2/(πz)` and
//! `Y_2 + 4/(πz²)`, and the removed pieces do not depend on the wave number.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::BoundaryGrid;
use crate::linalg::CMatrix;
use crate::math::{cis, CVec2, Vec2, C64, EULER_GAMMA, I, PI, TAU};
use crate::par;
use crate::quadrature::{gauss_legendre, log_weights};
use crate::special::{hankel01, jy_regular};
use crate::transmission::farfield::FarField;

const INV_4PI: f64 = 1.0 / (4.0 * PI);

/// Which operator a matrix discretises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    S,
    K,
    KPrime,
    TDiff,
    KPrimeDiff,
}

/// Dense Nyström matrix of one boundary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    /// Wave number; for differences the subtracted one.
    pub k: f64,
    /// Interior wave number for differences.
    pub k1: Option<f64>,
    pub matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        self.matrix.matvec(f)
    }

    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows() == 0
    }
}

/// Boundary densities of the layer ansatz, sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    /// Double-layer density.
    pub psi: Vec<C64>,
    /// Single-layer density.
    pub phi: Vec<C64>,
}

impl DensityPair {
    pub fn zeros(n: usize) -> Self {
        DensityPair { psi: vec![C64::new(0.0, 0.0); n], phi: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    fn check(&self, grid: &BoundaryGrid) -> Result<()> {
        if self.psi.len() != grid.len() || self.phi.len() != grid.len() {
            return Err(Error::invalid("density length differs from the grid size"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Which {
    S,
    K,
    KPrime,
    /// Wave-number dependent part of `T`, see the module notes.
    TReg,
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(alloc::format!("wave number {k} must be finite and > 0")));
    }
    Ok(())
}

/// Kernel split `(M₁, M₂)` at grid nodes `(i, j)`, per unit grid parameter.
fn split(grid: &BoundaryGrid, which: Which, k: f64, i: usize, j: usize) -> (C64, C64) {
    let jac_j = grid.jac[j];
    if i == j {
        let jac = grid.jac[i];
        let nt = grid.normal[i] * jac;
        let curv = nt.dot(grid.ddx[i]) * INV_4PI / (jac * jac);
        return match which {
            Which::S => (
                C64::new(-INV_4PI * jac, 0.0),
                C64::new(-(EULER_GAMMA + (k * jac / 2.0).ln()) / TAU, 0.25) * jac,
            ),
            Which::K | Which::KPrime => (C64::new(0.0, 0.0), C64::new(curv, 0.0)),
            Which::TReg => {
                let k2 = k * k;
                (
                    C64::new(-k2 * jac / (8.0 * PI), 0.0),
                    C64::new(
                        -k2 * INV_4PI * ((k / 2.0).ln() + jac.ln())
                            + k2 * (1.0 - 2.0 * EULER_GAMMA) / (8.0 * PI),
                        k2 / 8.0,
                    ) * jac,
                )
            }
        };
    }
    let d = grid.x[i] - grid.x[j];
    let r = d.norm();
    let z = k * r;
    let [j0, j1, j2, y0, y1r] = jy_regular(z);
    let y1 = y1r - 2.0 / (PI * z);
    let lg = (4.0 * (0.5 * (grid.t[i] - grid.t[j])).sin().powi(2)).ln();
    let (m1, full) = match which {
        Which::S => {
            let m1 = -INV_4PI * j0 * jac_j;
            (C64::new(m1, 0.0), I * 0.25 * C64::new(j0, y0) * jac_j)
        }
        Which::K => {
            let nd = (grid.normal[j] * jac_j).dot(d) / r;
            (
                C64::new(-k * INV_4PI * nd * j1, 0.0),
                I * (0.25 * k * nd) * C64::new(j1, y1),
            )
        }
        Which::KPrime => {
            let nd = grid.normal[i].dot(d) / r * jac_j;
            (
                C64::new(k * INV_4PI * nd * j1, 0.0),
                -I * (0.25 * k * nd) * C64::new(j1, y1),
            )
        }
        Which::TReg => {
            let a = grid.normal[i].dot(d) * grid.normal[j].dot(d) / (r * r);
            let b = grid.normal[i].dot(grid.normal[j]);
            let y2r = 2.0 * y1r / z - y0;
            let k2 = k * k;
            let m1 = INV_4PI * (k2 * j2 * a - k * j1 * b / r) * jac_j;
            let g = I * 0.25
                * (C64::new(j2, y2r) * (-k2 * a) + C64::new(j1, y1r) * (k * b / r))
                * jac_j;
            (C64::new(m1, 0.0), g)
        }
    };
    (m1, full - m1 * lg)
}

fn assemble(grid: &BoundaryGrid, which: Which, k: f64) -> CMatrix {
    let n = grid.len();
    let r = log_weights(n);
    let h = TAU / n as f64;
    let rows = par::map(n, |i| {
        (0..n)
            .map(|j| {
                let (m1, m2) = split(grid, which, k, i, j);
                m1 * r[(i + n - j) % n] + m2 * h
            })
            .collect::<Vec<C64>>()
    });
    CMatrix::from_rows(n, n, rows.concat())
}

/// Single-layer operator `S`.
pub fn assemble_s(grid: &BoundaryGrid, k: f64) -> Result<OperatorMatrix> {
    check_k(k)?;
    Ok(OperatorMatrix { kind: OperatorKind::S, k, k1: None, matrix: assemble(grid, Which::S, k) })
}

/// Double-layer operator `K`.
pub fn assemble_k(grid: &BoundaryGrid, k: f64) -> Result<OperatorMatrix> {
    check_k(k)?;
    Ok(OperatorMatrix { kind: OperatorKind::K, k, k1: None, matrix: assemble(grid, Which::K, k) })
}

/// Adjoint double-layer operator `K′`.
pub fn assemble_kprime(grid: &BoundaryGrid, k: f64) -> Result<OperatorMatrix> {
    check_k(k)?;
    Ok(OperatorMatrix {
        kind: OperatorKind::KPrime,
        k,
        k1: None,
        matrix: assemble(grid, Which::KPrime, k),
    })
}

fn difference(grid: &BoundaryGrid, which: Which, k1: f64, k: f64) -> CMatrix {
    if k1 == k {
        return CMatrix::zeros(grid.len(), grid.len());
    }
    let mut a = assemble(grid, which, k1);
    a.add_scaled(C64::new(-1.0, 0.0), &assemble(grid, which, k));
    a
}

/// `T₁ − T` for wave numbers `k₁` (first) and `k`.
pub fn assemble_t_diff(grid: &BoundaryGrid, k1: f64, k: f64) -> Result<OperatorMatrix> {
    check_k(k)?;
    check_k(k1)?;
    Ok(OperatorMatrix {
        kind: OperatorKind::TDiff,
        k,
        k1: Some(k1),
        matrix: difference(grid, Which::TReg, k1, k),
    })
}

/// `K′₁ − K′` for wave numbers `k₁` (first) and `k`.
pub fn assemble_kprime_diff(grid: &BoundaryGrid, k1: f64, k: f64) -> Result<OperatorMatrix> {
    check_k(k)?;
    check_k(k1)?;
    Ok(OperatorMatrix {
        kind: OperatorKind::KPrimeDiff,
        k,
        k1: Some(k1),
        matrix: difference(grid, Which::KPrime, k1, k),
    })
}

/// Trigonometric interpolant of equispaced periodic samples.
#[derive(Debug, Clone)]
pub struct TrigInterp {
    coeffs: Vec<C64>,
}

impl TrigInterp {
    pub fn new(samples: &[C64]) -> Self {
        let n = samples.len();
        let coeffs = (0..n)
            .map(|m| {
                let mut s = C64::new(0.0, 0.0);
                for (j, f) in samples.iter().enumerate() {
                    s += f * cis(-TAU * ((m * j) % n) as f64 / n as f64);
                }
                s / n as f64
            })
            .collect();
        TrigInterp { coeffs }
    }

    /// Coefficient of `e^{ims}` for `|m| < N/2` (zero outside).
    pub fn coefficient(&self, m: i64) -> C64 {
        let n = self.coeffs.len() as i64;
        if 2 * m.abs() >= n {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[m.rem_euclid(n) as usize]
    }

    pub fn eval(&self, s: f64) -> C64 {
        let n = self.coeffs.len();
        let half = n / 2;
        let mut v = self.coeffs[0];
        let e = cis(s);
        let mut p = e;
        for m in 1..half {
            v += self.coeffs[m] * p + self.coeffs[n - m] * p.conj();
            p *= e;
        }
        if n.is_multiple_of(2) {
            v += self.coeffs[half] * (half as f64 * s).cos();
        } else {
            v += self.coeffs[half] * p + self.coeffs[n - half] * p.conj();
        }
        v
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, s: f64) -> C64 {
        let n = self.coeffs.len();
        let half = n / 2;
        let mut v = C64::new(0.0, 0.0);
        let e = cis(s);
        let mut p = e;
        for m in 1..half {
            let mf = m as f64;
            v += I * mf * (self.coeffs[m] * p - self.coeffs[n - m] * p.conj());
            p *= e;
        }
        if n.is_multiple_of(2) {
            v -= self.coeffs[half] * (half as f64) * (half as f64 * s).sin();
        }
        v
    }
}

/// Contribution of one source node to the potentials at `x`: value and
/// gradient of `Φ φ + ∂_{ν(y)}Φ ψ`, times the arc-length weight.
#[inline]
fn node_contribution(k: f64, x: Vec2, y: Vec2, ny: Vec2, w: f64, psi: C64, phi: C64) -> (C64, CVec2) {
    let d = x - y;
    let r = d.norm();
    let z = k * r;
    let (h0, h1) = hankel01(z);
    let h2 = h1 * (2.0 / z) - h0;
    let dn = d.dot(ny);
    let g = I * (0.25 * k / r) * h1;
    let val = I * 0.25 * h0 * phi + g * dn * psi;
    let gs = -g;
    let gp = -I * (0.25 * k * k / (r * r)) * h2 * dn;
    let grad = CVec2::scaled(d, gs * phi + gp * psi) + CVec2::scaled(ny, g * psi);
    (val * w, grad * w)
}

/// Far- and near-field evaluator for `SLP_k[φ] + DLP_k[ψ]`.
#[derive(Debug, Clone)]
pub struct PotentialEvaluator {
    grid: BoundaryGrid,
    k: f64,
    psi: Vec<C64>,
    phi: Vec<C64>,
    psi_i: TrigInterp,
    phi_i: TrigInterp,
    weights: Vec<f64>,
    diameter: f64,
    panels: Vec<Panel>,
    gl: (Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    center: Vec2,
    length: f64,
    nodes: Vec<PanelNode>,
}

#[derive(Debug, Clone, Copy)]
struct PanelNode {
    y: Vec2,
    ny: Vec2,
    w: f64,
    psi: C64,
    phi: C64,
}

/// Subdivision depth of the near evaluator.
pub const NEAR_LEVELS: usize = 5;
const NEAR_ORDER: usize = 16;

impl PotentialEvaluator {
    pub fn new(grid: &BoundaryGrid, densities: &DensityPair, k: f64) -> Result<Self> {
        check_k(k)?;
        densities.check(grid)?;
        let gl = gauss_legendre(NEAR_ORDER);
        let psi_i = TrigInterp::new(&densities.psi);
        let phi_i = TrigInterp::new(&densities.phi);
        let mut ev = PotentialEvaluator {
            grid: grid.clone(),
            k,
            psi: densities.psi.clone(),
            phi: densities.phi.clone(),
            psi_i,
            phi_i,
            weights: grid.weights(),
            diameter: grid.curve().diameter(),
            panels: Vec::new(),
            gl,
        };
        let p = grid.len() / 2;
        ev.panels = (0..p)
            .map(|i| ev.panel(TAU * i as f64 / p as f64, TAU * (i + 1) as f64 / p as f64))
            .collect();
        Ok(ev)
    }

    fn panel(&self, a: f64, b: f64) -> Panel {
        let (gx, gw) = &self.gl;
        let hm = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = gx
            .iter()
            .zip(gw)
            .map(|(x, w)| {
                let s = mid + hm * x;
                let (_, p) = self.grid.eval_param(s);
                PanelNode {
                    y: p.x,
                    ny: p.normal(),
                    w: w * hm * p.jacobian(),
                    psi: self.psi_i.eval(s),
                    phi: self.phi_i.eval(s),
                }
            })
            .collect();
        let (_, c) = self.grid.eval_param(mid);
        Panel { a, b, center: c.x, length: c.jacobian() * (b - a), nodes }
    }

    /// Distance to the nearest grid node and the local spacing there.
    fn proximity(&self, x: Vec2) -> (f64, f64) {
        let mut best = f64::INFINITY;
        let mut bi = 0;
        for (i, y) in self.grid.x.iter().enumerate() {
            let d = (x - *y).norm_sqr();
            if d < best {
                best = d;
                bi = i;
            }
        }
        (best.sqrt(), self.grid.local_spacing(bi))
    }

    /// Whether the plain trapezoidal rule is accurate at `x`.
    pub fn is_far(&self, x: Vec2) -> bool {
        let (d, h) = self.proximity(x);
        d >= 5.0 * h
    }

    /// Trapezoidal evaluation; points closer than five local node spacings
    /// are rejected.
    pub fn eval_far(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let (d, h) = self.proximity(x);
        if d < 5.0 * h {
            return Err(Error::Accuracy(alloc::format!(
                "point at distance {d:.3e} from the boundary is inside the near zone (5 × spacing = {:.3e}); refine N or use the near evaluator",
                5.0 * h
            )));
        }
        Ok(self.trapezoid(x))
    }

    fn trapezoid(&self, x: Vec2) -> (C64, CVec2) {
        let g = &self.grid;
        let mut v = C64::new(0.0, 0.0);
        let mut gr = CVec2::ZERO;
        for j in 0..g.len() {
            let (a, b) = node_contribution(self.k, x, g.x[j], g.normal[j], self.weights[j], self.psi[j], self.phi[j]);
            v += a;
            gr = gr + b;
        }
        (v, gr)
    }

    /// Panel quadrature with adaptive subdivision near `x`.
    pub fn eval_near(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let (d, _) = self.proximity(x);
        // Node distance overestimates the curve distance by at most half a
        // spacing; the panel criterion below is what guarantees accuracy.
        let dist = self.curve_distance(x, d);
        if dist < 1e-4 * self.diameter {
            return Err(Error::Accuracy(alloc::format!(
                "point at distance {dist:.3e} is below the near-evaluation limit 1e-4 × diameter"
            )));
        }
        let mut v = C64::new(0.0, 0.0);
        let mut gr = CVec2::ZERO;
        for p in &self.panels {
            self.accumulate(x, p, 0, &mut v, &mut gr);
        }
        Ok((v, gr))
    }

    fn curve_distance(&self, x: Vec2, node_dist: f64) -> f64 {
        let curve = self.grid.curve();
        let t = curve.closest_parameter(x);
        (curve.point(t) - x).norm().min(node_dist)
    }

    fn accumulate(&self, x: Vec2, p: &Panel, level: usize, v: &mut C64, gr: &mut CVec2) {
        if level < NEAR_LEVELS && (x - p.center).norm() < 1.5 * p.length {
            let m = 0.5 * (p.a + p.b);
            for sub in [self.panel(p.a, m), self.panel(m, p.b)] {
                self.accumulate(x, &sub, level + 1, v, gr);
            }
            return;
        }
        for n in &p.nodes {
            let (a, b) = node_contribution(self.k, x, n.y, n.ny, n.w, n.psi, n.phi);
            *v += a;
            *gr = *gr + b;
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    /// Trapezoid where accurate, panel quadrature otherwise.
    pub fn eval(&self, x: Vec2) -> Result<(C64, CVec2)> {
        if self.is_far(x) {
            Ok(self.trapezoid(x))
        } else {
            self.eval_near(x)
        }
    }
}

/// `SLP_k[φ] + DLP_k[ψ]` and gradients at points at least five node
/// spacings away from the boundary.
pub fn eval_potentials(
    grid: &BoundaryGrid,
    densities: &DensityPair,
    k: f64,
    points: &[Vec2],
) -> Result<Vec<(C64, CVec2)>> {
    let ev = PotentialEvaluator::new(grid, densities, k)?;
    par::map(points.len(), |i| ev.eval_far(points[i]).map_err(|e| e.at(i)))
        .into_iter()
        .collect()
}

/// Same potentials by adaptive panel quadrature, for points close to the
/// boundary (but not closer than `10⁻⁴ · diameter`).
pub fn eval_potentials_near(
    grid: &BoundaryGrid,
    densities: &DensityPair,
    k: f64,
    points: &[Vec2],
) -> Result<Vec<(C64, CVec2)>> {
    let ev = PotentialEvaluator::new(grid, densities, k)?;
    par::map(points.len(), |i| ev.eval_near(points[i]).map_err(|e| e.at(i)))
        .into_iter()
        .collect()
}

/// `e^{iπ/4}/√(8πk)`, the far-field constant of `Φ`.
pub fn farfield_constant(k: f64) -> C64 {
    cis(PI / 4.0) / (8.0 * PI * k).sqrt()
}

/// Far-field pattern of `SLP_k[φ] + DLP_k[ψ]` at `m` equispaced angles.
pub fn farfield_from_densities(
    grid: &BoundaryGrid,
    densities: &DensityPair,
    k: f64,
    m: usize,
) -> Result<FarField> {
    check_k(k)?;
    densities.check(grid)?;
    let c = farfield_constant(k);
    let w = grid.weights();
    let samples = par::map(m, |a| {
        let xh = Vec2::polar(1.0, TAU * a as f64 / m as f64);
        let mut s = C64::new(0.0, 0.0);
        for j in 0..grid.len() {
            let e = cis(-k * xh.dot(grid.x[j]));
            s += e * w[j] * (densities.phi[j] - I * k * xh.dot(grid.normal[j]) * densities.psi[j]);
        }
        c * s
    });
    FarField::new(samples, k, None)
}
