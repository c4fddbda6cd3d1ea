//! Closed boundary curves, boundary grids, point classification and the
//! probe domain `D₀ = B(z*, r₀) ∩ D`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{bisect, Vec2, PI, TAU};
use crate::quadrature::gauss_legendre_on;

/// Shape of a closed, counter-clockwise, 2π-periodic curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `x(t) = (cos t + 0.65 cos 2t − 0.65, 1.5 sin t)`.
    Kite,
    /// Star-shaped curve `r(t)(cos t, sin t)` with
    /// `r(t) = a₀ + Σ_k (a_k cos kt + b_k sin kt)`.
    Star { cos: Vec<f64>, sin: Vec<f64> },
}

/// Value and first two derivatives of the parameterisation at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: Vec2,
    pub dx: Vec2,
    pub ddx: Vec2,
}

impl CurvePoint {
    pub fn jacobian(&self) -> f64 {
        self.dx.norm()
    }

    /// Outward unit normal (the curve runs counter-clockwise).
    pub fn normal(&self) -> Vec2 {
        self.dx.rot_cw().normalized()
    }

    pub fn tangent(&self) -> Vec2 {
        self.dx.normalized()
    }

    /// Signed curvature, positive for a convex arc.
    pub fn curvature(&self) -> f64 {
        self.dx.cross(self.ddx) / self.dx.norm().powi(3)
    }
}

/// A validated smooth closed curve with period 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCurve {
    kind: CurveKind,
}

/// Output of [`curve_eval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub point: Vec2,
    pub tangent: Vec2,
    pub normal: Vec2,
    pub jacobian: f64,
}

impl ParamCurve {
    pub fn new(kind: CurveKind) -> Result<Self> {
        let bad = |what: &str| Err(Error::invalid(String::from(what)));
        match &kind {
            CurveKind::Circle { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("circle radius must be finite and > 0");
                }
            }
            CurveKind::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return bad("ellipse semi-axes must be finite and > 0");
                }
            }
            CurveKind::Kite => {}
            CurveKind::Star { cos, sin } => {
                if cos.is_empty() || cos.iter().chain(sin).any(|v| !v.is_finite()) {
                    return bad("star curve needs finite coefficients and a constant term");
                }
            }
        }
        let curve = ParamCurve { kind };
        if let CurveKind::Star { .. } = curve.kind {
            for i in 0..1024 {
                let t = TAU * i as f64 / 1024.0;
                if curve.star_radius(t).0 <= 0.0 {
                    return bad("star curve radius must stay positive");
                }
            }
        }
        Ok(curve)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(CurveKind::Circle { radius })
    }

    pub fn unit_circle() -> Self {
        ParamCurve { kind: CurveKind::Circle { radius: 1.0 } }
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(CurveKind::Ellipse { a, b })
    }

    pub fn kite() -> Self {
        ParamCurve { kind: CurveKind::Kite }
    }

    /// Builds a curve from a configuration pair such as `("ellipse", [2, 1])`.
    pub fn from_kind_params(kind: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::invalid(alloc::format!(
                    "geometry kind '{kind}' takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        match kind {
            "circle" => {
                want(1)?;
                Self::circle(params[0])
            }
            "ellipse" => {
                want(2)?;
                Self::ellipse(params[0], params[1])
            }
            "kite" => {
                want(0)?;
                Ok(Self::kite())
            }
            "custom" | "star" => {
                if params.is_empty() || params.len().is_multiple_of(2) {
                    return Err(Error::invalid(
                        "custom coefficients are [a0, a1, b1, a2, b2, ...] (odd count)",
                    ));
                }
                let mut cos = vec![params[0]];
                let mut sin = vec![0.0];
                for pair in params[1..].chunks_exact(2) {
                    cos.push(pair[0]);
                    sin.push(pair[1]);
                }
                Self::new(CurveKind::Star { cos, sin })
            }
            other => Err(Error::invalid(alloc::format!("unknown geometry kind '{other}'"))),
        }
    }

    /// Name and parameters, the inverse of [`ParamCurve::from_kind_params`].
    pub fn kind_params(&self) -> (&'static str, Vec<f64>) {
        match &self.kind {
            CurveKind::Circle { radius } => ("circle", vec![*radius]),
            CurveKind::Ellipse { a, b } => ("ellipse", vec![*a, *b]),
            CurveKind::Kite => ("kite", Vec::new()),
            CurveKind::Star { cos, sin } => {
                let mut p = vec![cos[0]];
                for k in 1..cos.len() {
                    p.push(cos[k]);
                    p.push(sin[k]);
                }
                ("custom", p)
            }
        }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Radius if the curve is a circle centred at the origin.
    pub fn circle_radius(&self) -> Option<f64> {
        match self.kind {
            CurveKind::Circle { radius } => Some(radius),
            _ => None,
        }
    }

    fn star_radius(&self, t: f64) -> (f64, f64, f64) {
        let CurveKind::Star { cos, sin } = &self.kind else {
            unreachable!()
        };
        let mut r = cos[0];
        let mut dr = 0.0;
        let mut ddr = 0.0;
        for k in 1..cos.len() {
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            r += cos[k] * c + sin[k] * s;
            dr += kf * (-cos[k] * s + sin[k] * c);
            ddr -= kf * kf * (cos[k] * c + sin[k] * s);
        }
        (r, dr, ddr)
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        let (s, c) = t.sin_cos();
        match &self.kind {
            CurveKind::Circle { radius: r } => CurvePoint {
                x: Vec2::new(r * c, r * s),
                dx: Vec2::new(-r * s, r * c),
                ddx: Vec2::new(-r * c, -r * s),
            },
            CurveKind::Ellipse { a, b } => CurvePoint {
                x: Vec2::new(a * c, b * s),
                dx: Vec2::new(-a * s, b * c),
                ddx: Vec2::new(-a * c, -b * s),
            },
            CurveKind::Kite => {
                let (s2, c2) = (2.0 * t).sin_cos();
                CurvePoint {
                    x: Vec2::new(c + 0.65 * c2 - 0.65, 1.5 * s),
                    dx: Vec2::new(-s - 1.3 * s2, 1.5 * c),
                    ddx: Vec2::new(-c - 2.6 * c2, -1.5 * s),
                }
            }
            CurveKind::Star { .. } => {
                let (r, dr, ddr) = self.star_radius(t);
                CurvePoint {
                    x: Vec2::new(r * c, r * s),
                    dx: Vec2::new(dr * c - r * s, dr * s + r * c),
                    ddx: Vec2::new(ddr * c - 2.0 * dr * s - r * c, ddr * s + 2.0 * dr * c - r * s),
                }
            }
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.eval(t).x
    }

    pub fn normal(&self, t: f64) -> Vec2 {
        self.eval(t).normal()
    }

    /// `x(t)`, unit tangent, outward normal and `|x′(t)|`.
    pub fn sample(&self, t: f64) -> CurveSample {
        let p = self.eval(t);
        CurveSample { point: p.x, tangent: p.tangent(), normal: p.normal(), jacobian: p.jacobian() }
    }

    /// Perimeter by the spectrally accurate trapezoidal rule.
    pub fn perimeter(&self) -> f64 {
        let n = 1024;
        (0..n).map(|i| self.eval(TAU * i as f64 / n as f64).jacobian()).sum::<f64>() * TAU / n as f64
    }

    /// Enclosed area, `½ ∮ x × x′ dt`.
    pub fn area(&self) -> f64 {
        let n = 1024;
        let s: f64 = (0..n)
            .map(|i| {
                let p = self.eval(TAU * i as f64 / n as f64);
                p.x.cross(p.dx)
            })
            .sum();
        0.5 * s * TAU / n as f64
    }

    /// Largest distance between two curve points.
    pub fn diameter(&self) -> f64 {
        let n = 512;
        let pts: Vec<Vec2> = (0..n).map(|i| self.point(TAU * i as f64 / n as f64)).collect();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max((pts[i] - pts[j]).norm());
            }
        }
        best
    }

    /// Smallest radius of curvature over the curve.
    pub fn min_radius_of_curvature(&self) -> f64 {
        let n = 4096;
        (0..n)
            .map(|i| 1.0 / self.eval(TAU * i as f64 / n as f64).curvature().abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from the origin to the curve, padded like [`Self::bounding_box`].
    pub fn max_norm(&self) -> f64 {
        let n = 4096;
        let r = (0..n).map(|i| self.point(TAU * i as f64 / n as f64).norm()).fold(0.0, f64::max);
        r * (1.0 + 1e-5)
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let n = 4096;
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let p = self.point(TAU * i as f64 / n as f64);
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        // Samples can miss the extreme by O(h²); pad generously.
        let pad = 1e-5 * (hi - lo).norm();
        (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad))
    }

    /// Parameter of the curve point closest to `p`, refined by Newton's
    /// method from the nearest of `n` samples.
    pub fn closest_parameter(&self, p: Vec2) -> f64 {
        let n = 1024;
        let mut t0 = 0.0;
        let mut best = f64::INFINITY;
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            let d = (self.point(t) - p).norm_sqr();
            if d < best {
                best = d;
                t0 = t;
            }
        }
        self.refine_closest(p, t0, TAU / n as f64)
    }

    fn refine_closest(&self, p: Vec2, t0: f64, h: f64) -> f64 {
        let mut t = t0;
        for _ in 0..30 {
            let c = self.eval(t);
            let d = c.x - p;
            let f = d.dot(c.dx);
            let df = c.dx.norm_sqr() + d.dot(c.ddx);
            if df <= 0.0 {
                break;
            }
            let step = (f / df).clamp(-h, h);
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        num_traits::Euclid::rem_euclid(&t, &TAU)
    }
}

/// `curve_eval(curve, t)`: point, unit tangent, outward normal, jacobian.
pub fn curve_eval(curve: &ParamCurve, t: f64) -> CurveSample {
    curve.sample(t)
}

/// Periodic reparameterisation `σ(s) = s − α sin(s − s*)`, which clusters
/// nodes near the parameter `s*` with local density `1/(1 − α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub center: f64,
    pub alpha: f64,
}

impl Grading {
    fn map(&self, s: f64) -> (f64, f64, f64) {
        let (sn, cs) = (s - self.center).sin_cos();
        (s - self.alpha * sn, 1.0 - self.alpha * cs, self.alpha * sn)
    }
}

/// Equispaced discretisation of a (possibly graded) parameterisation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    curve: ParamCurve,
    grading: Option<Grading>,
    /// Grid parameter `s_i = 2πi/N`.
    pub t: Vec<f64>,
    /// Curve parameter `σ(s_i)`; equals `t` without grading.
    pub sigma: Vec<f64>,
    pub x: Vec<Vec2>,
    pub normal: Vec<Vec2>,
    /// `|dx/ds|`.
    pub jac: Vec<f64>,
    pub dx: Vec<Vec2>,
    pub ddx: Vec<Vec2>,
}

impl BoundaryGrid {
    pub fn new(curve: &ParamCurve, n: usize) -> Result<Self> {
        Self::build(curve, n, None)
    }

    /// Grid clustered near curve parameter `center`; `0 ≤ alpha < 1`.
    pub fn graded(curve: &ParamCurve, n: usize, center: f64, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::invalid("grading strength must lie in [0, 1)"));
        }
        Self::build(curve, n, Some(Grading { center, alpha }))
    }

    fn build(curve: &ParamCurve, n: usize, grading: Option<Grading>) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::invalid(alloc::format!(
                "boundary node count must be even and ≥ 8, got {n}"
            )));
        }
        let mut g = BoundaryGrid {
            curve: curve.clone(),
            grading,
            t: Vec::with_capacity(n),
            sigma: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            normal: Vec::with_capacity(n),
            jac: Vec::with_capacity(n),
            dx: Vec::with_capacity(n),
            ddx: Vec::with_capacity(n),
        };
        for i in 0..n {
            let s = TAU * i as f64 / n as f64;
            let (sig, p) = g.eval_param(s);
            g.t.push(s);
            g.sigma.push(sig);
            g.x.push(p.x);
            g.normal.push(p.normal());
            g.jac.push(p.jacobian());
            g.dx.push(p.dx);
            g.ddx.push(p.ddx);
        }
        Ok(g)
    }

    /// Curve parameter and derivatives with respect to the grid parameter.
    pub fn eval_param(&self, s: f64) -> (f64, CurvePoint) {
        match self.grading {
            None => (s, self.curve.eval(s)),
            Some(gr) => {
                let (sig, d1, d2) = gr.map(s);
                let p = self.curve.eval(sig);
                (
                    sig,
                    CurvePoint { x: p.x, dx: p.dx * d1, ddx: p.ddx * (d1 * d1) + p.dx * d2 },
                )
            }
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn curve(&self) -> &ParamCurve {
        &self.curve
    }

    pub fn grading(&self) -> Option<Grading> {
        self.grading
    }

    /// Arc length between neighbouring nodes at node `i`.
    pub fn local_spacing(&self, i: usize) -> f64 {
        self.jac[i] * TAU / self.len() as f64
    }

    /// Largest node spacing.
    pub fn mesh_width(&self) -> f64 {
        self.jac.iter().fold(0.0f64, |a, &b| a.max(b)) * TAU / self.len() as f64
    }

    /// Trapezoidal weights `|x′(s_i)| 2π/N`.
    pub fn weights(&self) -> Vec<f64> {
        let h = TAU / self.len() as f64;
        self.jac.iter().map(|j| j * h).collect()
    }
}

/// `make_boundary_grid(curve, N)`.
pub fn make_boundary_grid(curve: &ParamCurve, n: usize) -> Result<BoundaryGrid> {
    BoundaryGrid::new(curve, n)
}

/// Result of classifying a point against a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    NearBoundary,
}

/// Fast repeated point classification. The curve is sampled into a fine
/// polygon whose edges are bucketed by horizontal bands; points within a
/// few polygon spacings of the curve are classified through the exact
/// closest point instead.
#[derive(Debug, Clone)]
pub struct InsideTester {
    curve: ParamCurve,
    t: Vec<f64>,
    pts: Vec<Vec2>,
    y0: f64,
    band_h: f64,
    bands: Vec<Vec<u32>>,
    spacing: f64,
    tol: f64,
}

impl InsideTester {
    const SAMPLES: usize = 4096;

    /// Tester with the default near-boundary tolerance `10⁻⁹ · diameter`.
    pub fn new(curve: &ParamCurve) -> Self {
        let tol = 1e-9 * curve.diameter();
        Self::with_tolerance(curve, tol)
    }

    pub fn with_tolerance(curve: &ParamCurve, tol: f64) -> Self {
        let n = Self::SAMPLES;
        let t: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let pts: Vec<Vec2> = t.iter().map(|&s| curve.point(s)).collect();
        let spacing = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).fold(0.0, f64::max);
        let margin = 4.0 * spacing;
        let (lo, hi) = pts.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), p| (lo.min(p.y), hi.max(p.y)),
        );
        let (lo, hi) = (lo - margin, hi + margin);
        let nb = 128;
        let band_h = (hi - lo) / nb as f64 * (1.0 + 1e-12);
        let mut bands = vec![Vec::new(); nb];
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let ymin = a.y.min(b.y) - margin;
            let ymax = a.y.max(b.y) + margin;
            let i0 = (((ymin - lo) / band_h).floor().max(0.0)) as usize;
            let i1 = (((ymax - lo) / band_h).floor() as isize).clamp(0, nb as isize - 1) as usize;
            for band in bands.iter_mut().take(i1 + 1).skip(i0.min(nb - 1)) {
                band.push(i as u32);
            }
        }
        InsideTester { curve: curve.clone(), t, pts, y0: lo, band_h, bands, spacing, tol }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Signed distance (negative inside) when `p` lies within a few polygon
    /// spacings of the curve, else `None`.
    fn near_distance(&self, p: Vec2, edges: &[u32]) -> Option<f64> {
        let n = self.pts.len();
        let reach = 4.0 * self.spacing;
        let mut best = f64::INFINITY;
        let mut bi = 0;
        for &e in edges {
            let i = e as usize;
            let d = (self.pts[i] - p).norm_sqr();
            if d < best {
                best = d;
                bi = i;
            }
        }
        if best.sqrt() > reach {
            return None;
        }
        let t = self.curve.refine_closest(p, self.t[bi], TAU / n as f64);
        let c = self.curve.eval(t);
        Some((p - c.x).dot(c.normal()))
    }

    pub fn classify(&self, p: Vec2) -> Containment {
        let nb = self.bands.len();
        let bi = ((p.y - self.y0) / self.band_h).floor();
        if bi < 0.0 || bi >= nb as f64 {
            return Containment::Outside;
        }
        let edges = &self.bands[bi as usize];
        if let Some(sd) = self.near_distance(p, edges) {
            let dist = if sd == 0.0 { 0.0 } else { sd.abs() };
            if dist < self.tol {
                return Containment::NearBoundary;
            }
            return if sd < 0.0 { Containment::Inside } else { Containment::Outside };
        }
        let n = self.pts.len();
        let mut inside = false;
        for &e in edges {
            let a = self.pts[e as usize];
            let b = self.pts[(e as usize + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let xc = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < xc {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    pub fn is_inside(&self, p: Vec2) -> bool {
        self.classify(p) == Containment::Inside
    }
}

/// `contains_point(curve, p)` with tolerance `tol` for the near-boundary
/// band. For repeated queries build an [`InsideTester`] once.
pub fn contains_point(curve: &ParamCurve, p: Vec2, tol: f64) -> Containment {
    InsideTester::with_tolerance(curve, tol).classify(p)
}

/// Volume quadrature on a region, nodes and positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeQuadrature {
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl VolumeQuadrature {
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Polar quadrature of `B(z*, r_max) ∩ D` centred at the boundary point
/// `z* = x(t*)`.
///
/// For each ray the exact crossings with the curve are located, so each
/// radial integral covers an exact sub-interval of `D`. Angular panels are
/// split at the tangent directions and at the angles where the circle
/// `|x − z*| = r_max` meets the curve, so the integrand is smooth on every
/// panel. Radial panels are graded geometrically towards `z*`.
pub(crate) fn polar_quadrature(
    curve: &ParamCurve,
    t_star: f64,
    r_max: f64,
    angular_panels: usize,
    radial_levels: usize,
) -> VolumeQuadrature {
    let z = curve.point(t_star);
    let nu = curve.normal(t_star);
    let m = 2048;
    let ts: Vec<f64> = (0..=m).map(|i| t_star + TAU * i as f64 / m as f64).collect();
    let pts: Vec<Vec2> = ts.iter().map(|&t| curve.point(t)).collect();

    // Angular breakpoints.
    let th_nu = nu.angle();
    let mut breaks = vec![th_nu - PI / 2.0, th_nu + PI / 2.0];
    for i in 0..m {
        let f = |t: f64| (curve.point(t) - z).norm() - r_max;
        let (fa, fb) = (f(ts[i]), f(ts[i + 1]));
        if (fa < 0.0) != (fb < 0.0) {
            let t = bisect(f, ts[i], ts[i + 1], 1e-15);
            breaks.push((curve.point(t) - z).angle());
        }
    }
    let base = th_nu - PI / 2.0;
    let mut rel: Vec<f64> = breaks.iter().map(|b| num_traits::Euclid::rem_euclid(&(b - base), &TAU)).collect();
    rel.push(TAU);
    rel.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rel.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let (gx, gw) = crate::quadrature::gauss_legendre(8);
    // Nodes on near-tangent rays can fall inside the near-boundary band;
    // their weights are negligible and they are dropped.
    let tester = InsideTester::new(curve);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let q: f64 = 0.4;
    for w in rel.windows(2) {
        let (a0, a1) = (w[0], w[1]);
        if a1 - a0 < 1e-14 {
            continue;
        }
        let ph = (a1 - a0) / angular_panels as f64;
        for p in 0..angular_panels {
            let (an, aw) = gauss_legendre_on(8, a0 + p as f64 * ph, a0 + (p + 1) as f64 * ph);
            for (th_rel, wth) in an.into_iter().zip(aw) {
                let th = base + th_rel;
                let e = Vec2::polar(1.0, th);
                for (s0, s1) in ray_intervals(curve, z, nu, e, &ts, &pts, r_max) {
                    // Geometric panels toward s0 only when the interval touches z*.
                    let mut cuts = Vec::new();
                    if s0 == 0.0 {
                        cuts.push(0.0);
                        for l in (1..=radial_levels).rev() {
                            cuts.push(s1 * q.powi(l as i32));
                        }
                        cuts.push(s1);
                    } else {
                        let k = 4;
                        for i in 0..=k {
                            cuts.push(s0 + (s1 - s0) * i as f64 / k as f64);
                        }
                    }
                    for c in cuts.windows(2) {
                        let (r0, r1) = (c[0], c[1]);
                        let hm = 0.5 * (r1 - r0);
                        let mid = 0.5 * (r1 + r0);
                        for (x, wx) in gx.iter().zip(&gw) {
                            let r = mid + hm * x;
                            let p = z + e * r;
                            if tester.classify(p) == Containment::Inside {
                                nodes.push(p);
                                weights.push(wth * wx * hm * r);
                            }
                        }
                    }
                }
            }
        }
    }
    VolumeQuadrature { nodes, weights }
}

/// Sub-intervals `(s0, s1)` of `[0, r_max]` where `z* + s e` lies in `D`.
fn ray_intervals(
    curve: &ParamCurve,
    z: Vec2,
    nu: Vec2,
    e: Vec2,
    ts: &[f64],
    pts: &[Vec2],
    r_max: f64,
) -> Vec<(f64, f64)> {
    let f = |t: f64| e.cross(curve.point(t) - z);
    let mut cross = Vec::new();
    let m = pts.len() - 1;
    // Skip the brackets adjacent to z* itself, which is always a root.
    for i in 1..m - 1 {
        let fa = e.cross(pts[i] - z);
        let fb = e.cross(pts[i + 1] - z);
        if (fa < 0.0) != (fb < 0.0) {
            let t = bisect(f, ts[i], ts[i + 1], 1e-15);
            let s = e.dot(curve.point(t) - z);
            if s > 0.0 && s < r_max {
                cross.push(s);
            }
        }
    }
    // Near-tangent rays may cross inside the skipped brackets.
    for &(a, b) in &[(0usize, 1usize), (m - 1, m)] {
        let lo = if a == 0 { ts[a] + 1e-9 } else { ts[a] };
        let hi = if b == m { ts[b] - 1e-9 } else { ts[b] };
        let (flo, fhi) = (f(lo), f(hi));
        if (flo < 0.0) != (fhi < 0.0) {
            let t = bisect(f, lo, hi, 1e-15);
            let s = e.dot(curve.point(t) - z);
            if s > 1e-12 * r_max && s < r_max {
                cross.push(s);
            }
        }
    }
    cross.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut inside = e.dot(nu) < 0.0;
    let mut out = Vec::new();
    let mut start = 0.0;
    for s in cross.into_iter().chain(core::iter::once(r_max)) {
        if inside && s > start {
            out.push((start, s));
        }
        inside = !inside;
        start = s;
    }
    out
}

/// Probe domain `D₀ = B(z*, r₀) ∩ D` with its volume quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeDomain {
    pub anchor_param: f64,
    pub anchor: Vec2,
    pub radius: f64,
    pub quadrature: VolumeQuadrature,
}

impl ProbeDomain {
    pub fn area(&self) -> f64 {
        self.quadrature.area()
    }
}

/// `build_probe_domain(curve, z*, r₀, resolution)`, with `z*` given by its
/// curve parameter. `resolution` is the number of angular panels per arc.
pub fn build_probe_domain(
    curve: &ParamCurve,
    anchor_param: f64,
    r0: f64,
    resolution: usize,
) -> Result<ProbeDomain> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::invalid("probe radius must be finite and > 0"));
    }
    let reach = curve.min_radius_of_curvature();
    if r0 > 0.5 * reach {
        return Err(Error::invalid(alloc::format!(
            "probe radius {r0} exceeds half the minimum radius of curvature ({reach:.4})"
        )));
    }
    if resolution < 2 {
        return Err(Error::invalid("probe resolution must be at least 2"));
    }
    let quadrature = polar_quadrature(curve, anchor_param, r0, resolution, 10);
    Ok(ProbeDomain { anchor_param, anchor: curve.point(anchor_param), radius: r0, quadrature })
}

/// Quadrature of the whole region `D`, polar around a boundary anchor
/// and graded towards it; suited to integrands singular near that anchor.
pub fn anchored_domain_quadrature(
    curve: &ParamCurve,
    anchor_param: f64,
    resolution: usize,
) -> VolumeQuadrature {
    let r = 1.01 * curve.diameter();
    polar_quadrature(curve, anchor_param, r, resolution, 14)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let c = curve_eval(&ParamCurve::unit_circle(), 0.0);
        assert_eq!(c.point, Vec2::new(1.0, 0.0));
        assert!((c.normal - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(c.jacobian, 1.0);
        let e = curve_eval(&ParamCurve::ellipse(2.0, 1.0).unwrap(), PI / 2.0);
        assert!((e.point - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((e.jacobian - 2.0).abs() < 1e-15);
        let k = curve_eval(&ParamCurve::kite(), 0.0);
        assert!((k.point - Vec2::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_counts() {
        let c = ParamCurve::unit_circle();
        assert!(BoundaryGrid::new(&c, 7).is_err());
        assert!(BoundaryGrid::new(&c, 6).is_err());
        assert!(BoundaryGrid::new(&c, 8).is_ok());
    }

    #[test]
    fn config_roundtrip() {
        for c in [ParamCurve::kite(), ParamCurve::ellipse(2.0, 1.0).unwrap()] {
            let (k, p) = c.kind_params();
            assert_eq!(ParamCurve::from_kind_params(k, &p).unwrap(), c);
        }
        assert!(ParamCurve::from_kind_params("sphere", &[1.0]).is_err());
    }
}
