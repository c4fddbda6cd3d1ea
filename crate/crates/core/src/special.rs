//! Bessel, Hankel and modified Bessel functions of integer order, the
//! two-dimensional Helmholtz fundamental solution and incident fields.
//!
//! Everything is computed from scratch:
//!
//! * `J_m` by Miller's backward recurrence normalised with
//!   `J_0 + 2 Σ J_{2k} = 1`, by its power series for `x ≤ 1`, and by the
//!   Hankel asymptotic expansion followed by upward recurrence for large
//!   arguments;
//! * `Y_0`, `Y_1` by Neumann series in the Miller sequence (asymptotics for
//!   large `x`), then upward recurrence, which is stable for `Y`;
//! * `I_m` by its positive power series;
//! * `K_0`, `K_1` by the trapezoidal rule on `∫₀^∞ e^{-x cosh t} cosh(νt) dt`,
//!   then upward recurrence.
//!
//! The public checked functions accept orders `|m| ≤ 60` and arguments up
//! to [`X_MAX`]; anything else is rejected with [`Error::OutOfRange`].

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{CVec2, Vec2, C64, EULER_GAMMA, I, PI};

/// Largest order accepted by the checked Bessel functions.
pub const MAX_ORDER: i32 = 60;
/// Largest argument accepted by the checked Bessel functions.
pub const X_MAX: f64 = 1.0e4;
/// Largest order and argument accepted by the modified Bessel functions.
pub const MAX_ORDER_MODIFIED: i32 = 40;
pub const X_MAX_MODIFIED: f64 = 100.0;

const ASYMPTOTIC_FROM: f64 = 25.0;

fn check_order(m: i32, cap: i32) -> Result<()> {
    if m.abs() > cap {
        return Err(Error::OutOfRange(alloc::format!(
            "order {m} exceeds the supported cap {cap}"
        )));
    }
    Ok(())
}

fn check_arg(x: f64, cap: f64, allow_zero: bool) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(alloc::format!("argument {x} must be finite and ≥ 0")));
    }
    if x == 0.0 && !allow_zero {
        return Err(Error::Domain("logarithmic singularity at x = 0".into()));
    }
    if x > cap {
        return Err(Error::OutOfRange(alloc::format!(
            "argument {x} exceeds the supported range {cap}"
        )));
    }
    Ok(())
}

#[inline]
fn reflect(m: i32, v: f64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `J_m(x)` for integer `m` (negative orders by reflection) and `x ≥ 0`.
pub fn bessel_j(m: i32, x: f64) -> Result<f64> {
    check_order(m, MAX_ORDER)?;
    check_arg(x, X_MAX, true)?;
    let n = m.unsigned_abs() as usize;
    Ok(reflect(m, bessel_j_seq(n, x)[n]))
}

/// `Y_m(x)` for integer `m` and `x > 0`.
pub fn bessel_y(m: i32, x: f64) -> Result<f64> {
    check_order(m, MAX_ORDER)?;
    check_arg(x, X_MAX, false)?;
    let n = m.unsigned_abs() as usize;
    let y = bessel_y_seq(n, x)[n];
    if !y.is_finite() {
        return Err(Error::OutOfRange(alloc::format!("Y_{m}({x}) overflows")));
    }
    Ok(reflect(m, y))
}

/// `H_m^{(1)}(x) = J_m(x) + i Y_m(x)`.
pub fn hankel1(m: i32, x: f64) -> Result<C64> {
    Ok(C64::new(bessel_j(m, x)?, bessel_y(m, x)?))
}

/// `J_0(x), …, J_nmax(x)`. Unchecked: `x` must be finite and non-negative.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x <= 1.0 {
        for (m, o) in out.iter_mut().enumerate() {
            *o = j_series(m, x);
        }
        return out;
    }
    if x > ASYMPTOTIC_FROM && (nmax as f64) <= x {
        let (j0, j1, _, _) = asymptotic01(x);
        out[0] = j0;
        if nmax >= 1 {
            out[1] = j1;
        }
        for m in 1..nmax {
            out[m + 1] = 2.0 * m as f64 / x * out[m] - out[m - 1];
        }
        return out;
    }
    let full = miller(nmax, x);
    out.copy_from_slice(&full[..=nmax]);
    out
}

/// `Y_0(x), …, Y_nmax(x)` for `x > 0`. Unchecked; large orders at tiny
/// arguments overflow to infinity.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Vec<f64> {
    let (_, _, y0, y1) = jy01(x);
    let mut out = vec![0.0; nmax + 1];
    out[0] = y0;
    if nmax >= 1 {
        out[1] = y1;
    }
    for m in 1..nmax {
        out[m + 1] = 2.0 * m as f64 / x * out[m] - out[m - 1];
    }
    out
}

/// `(J_0, J_1, Y_0, Y_1)` at `x > 0`, the hot path of kernel evaluation.
pub fn jy01(x: f64) -> (f64, f64, f64, f64) {
    if x > ASYMPTOTIC_FROM {
        return asymptotic01(x);
    }
    let j = miller(1, x);
    let j0 = j[0];
    let j1 = j[1];
    let lg = (x / 2.0).ln();
    // Neumann series for Y_0 and Y_1.
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s0 += sign * j[2 * k] / kf;
        if 2 * k + 1 < j.len() {
            s1 += sign * (1.0 + 2.0 * kf) * j[2 * k + 1] / (kf * (1.0 + kf));
        }
        k += 1;
    }
    let y0 = 2.0 / PI * ((lg + EULER_GAMMA) * j0 - 2.0 * s0);
    let y1 = 2.0 / PI * (-j0 / x + (lg - (1.0 - EULER_GAMMA)) * j1 - s1);
    (j0, j1, y0, y1)
}

/// `[J_0, J_1, J_2, Y_0, Y_1 + 2/(πx)]` at `x > 0`.
///
/// The last entry removes the pole of `Y_1` without cancellation, using
/// `1 − J_0 = 2 Σ_{k≥1} J_{2k}`; it feeds kernels whose hypersingular parts
/// cancel between two wave numbers.
pub fn jy_regular(x: f64) -> [f64; 5] {
    if x > ASYMPTOTIC_FROM {
        let (j0, j1, y0, y1) = asymptotic01(x);
        return [j0, j1, 2.0 * j1 / x - j0, y0, y1 + 2.0 / (PI * x)];
    }
    let j = miller(2, x);
    let lg = (x / 2.0).ln();
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut even = 0.0;
    let mut k = 1;
    while 2 * k < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s0 += sign * j[2 * k] / kf;
        even += j[2 * k];
        if 2 * k + 1 < j.len() {
            s1 += sign * (1.0 + 2.0 * kf) * j[2 * k + 1] / (kf * (1.0 + kf));
        }
        k += 1;
    }
    let y0 = 2.0 / PI * ((lg + EULER_GAMMA) * j[0] - 2.0 * s0);
    let y1r = 2.0 / PI * (2.0 * even / x + (lg - (1.0 - EULER_GAMMA)) * j[1] - s1);
    [j[0], j[1], j[2], y0, y1r]
}

/// `(H_0^{(1)}(x), H_1^{(1)}(x))`.
#[inline]
pub fn hankel01(x: f64) -> (C64, C64) {
    let (j0, j1, y0, y1) = jy01(x);
    (C64::new(j0, y0), C64::new(j1, y1))
}

/// `J_m(x)` and `J_m'(x)` for `m = 0..=nmax`.
pub fn bessel_j_with_derivative(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let j = bessel_j_seq(nmax + 1, x);
    let mut d = vec![0.0; nmax + 1];
    d[0] = -j[1];
    for m in 1..=nmax {
        d[m] = 0.5 * (j[m - 1] - j[m + 1]);
    }
    (j[..=nmax].to_vec(), d)
}

/// `H_m^{(1)}(x)` and its derivative for `m = 0..=nmax`, `x > 0`.
pub fn hankel1_with_derivative(nmax: usize, x: f64) -> (Vec<C64>, Vec<C64>) {
    let j = bessel_j_seq(nmax + 1, x);
    let y = bessel_y_seq(nmax + 1, x);
    let h: Vec<C64> = j.iter().zip(&y).map(|(a, b)| C64::new(*a, *b)).collect();
    let mut d = vec![C64::new(0.0, 0.0); nmax + 1];
    d[0] = -h[1];
    for m in 1..=nmax {
        d[m] = (h[m - 1] - h[m + 1]) * 0.5;
    }
    (h[..=nmax].to_vec(), d)
}

fn j_series(m: usize, x: f64) -> f64 {
    let h = x / 2.0;
    let mut lead = 1.0;
    for i in 1..=m {
        lead *= h / i as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = -h * h;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..60 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller backward recurrence. Returns `J_0..J_start` normalised so that
/// `J_0 + 2 Σ J_{2k} = 1`; the length exceeds `nmax + 1`.
fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let base = (nmax as f64).max(x);
    let mut start = (base + 30.0 + 6.0 * x.cbrt()) as usize;
    start += start % 2;
    let mut j = vec![0.0; start + 2];
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    for m in (1..=start).rev() {
        j[m - 1] = 2.0 * m as f64 / x * j[m] - j[m + 1];
        if j[m - 1].abs() > 1e250 {
            for v in j[m - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    let mut m = 2;
    while m <= start {
        norm += 2.0 * j[m];
        m += 2;
    }
    j.truncate(start + 1);
    for v in j.iter_mut() {
        *v /= norm;
    }
    j
}

/// Hankel asymptotic expansion of `J_0, J_1, Y_0, Y_1` for large `x`.
fn asymptotic01(x: f64) -> (f64, f64, f64, f64) {
    let pq = |nu: f64| -> (f64, f64) {
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut a = 1.0;
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let kf = k as f64;
            a *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
            if a.abs() > prev || a == 0.0 {
                break;
            }
            prev = a.abs();
            // Terms alternate: q gets odd k, p even k, each with sign (-1)^{⌊k/2⌋}.
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 1 {
                q += sign * a;
            } else {
                p += sign * a;
            }
            if a.abs() < 1e-17 {
                break;
            }
        }
        (p, q)
    };
    let amp = (2.0 / (PI * x)).sqrt();
    let (p0, q0) = pq(0.0);
    let (p1, q1) = pq(1.0);
    let chi0 = x - PI / 4.0;
    let chi1 = x - 3.0 * PI / 4.0;
    let (s0, c0) = chi0.sin_cos();
    let (s1, c1) = chi1.sin_cos();
    (
        amp * (p0 * c0 - q0 * s0),
        amp * (p1 * c1 - q1 * s1),
        amp * (p0 * s0 + q0 * c0),
        amp * (p1 * s1 + q1 * c1),
    )
}

/// `I_m(x)`, `x ≥ 0`.
pub fn bessel_i(m: i32, x: f64) -> Result<f64> {
    check_order(m, MAX_ORDER_MODIFIED)?;
    check_arg(x, X_MAX_MODIFIED, true)?;
    Ok(i_series(m.unsigned_abs() as usize, x))
}

/// `K_m(x)`, `x > 0`.
pub fn bessel_k(m: i32, x: f64) -> Result<f64> {
    check_order(m, MAX_ORDER_MODIFIED)?;
    check_arg(x, X_MAX_MODIFIED, false)?;
    let n = m.unsigned_abs() as usize;
    Ok(bessel_k_seq(n, x)[n])
}

fn i_series(m: usize, x: f64) -> f64 {
    let h = x / 2.0;
    let mut lead = 1.0;
    for i in 1..=m {
        lead *= h / i as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = h * h;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..1000 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `I_0(x), …, I_nmax(x)`; unchecked.
pub fn bessel_i_seq(nmax: usize, x: f64) -> Vec<f64> {
    (0..=nmax).map(|m| i_series(m, x)).collect()
}

/// `K_0(x), …, K_nmax(x)` for `x > 0`; unchecked.
pub fn bessel_k_seq(nmax: usize, x: f64) -> Vec<f64> {
    // Trapezoid on the even integrand, scaled by e^{x}. The step resolves
    // both the strip of analyticity and the Gaussian width 1/√x.
    let h = 0.25f64.min(0.5 / x.sqrt());
    let mut k0 = 0.5;
    let mut k1 = 0.5;
    let mut i = 1;
    loop {
        let t = i as f64 * h;
        let e = (-x * (t.cosh() - 1.0)).exp();
        k0 += e;
        k1 += e * t.cosh();
        if e * t.cosh() < 1e-18 * k1 {
            break;
        }
        i += 1;
    }
    let scale = h * (-x).exp();
    let mut out = vec![0.0; nmax + 1];
    out[0] = k0 * scale;
    if nmax >= 1 {
        out[1] = k1 * scale;
    }
    for m in 1..nmax {
        out[m + 1] = out[m - 1] + 2.0 * m as f64 / x * out[m];
    }
    out
}

/// Wave number of the free-space kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveKernel {
    k: f64,
}

impl WaveKernel {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(alloc::format!("wave number {k} must be finite and > 0")));
        }
        Ok(WaveKernel { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn phi(&self, x: Vec2, y: Vec2) -> Result<C64> {
        phi(self.k, x, y)
    }

    pub fn grad_phi(&self, x: Vec2, y: Vec2) -> Result<CVec2> {
        grad_phi(self.k, x, y)
    }
}

fn separation(x: Vec2, y: Vec2) -> Result<(Vec2, f64)> {
    let d = x - y;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::Domain("fundamental solution evaluated at its source".into()));
    }
    Ok((d, r))
}

/// `Φ(x, y) = (i/4) H_0^{(1)}(k|x − y|)`.
pub fn phi(k: f64, x: Vec2, y: Vec2) -> Result<C64> {
    let (_, r) = separation(x, y)?;
    let (j0, _, y0, _) = jy01(k * r);
    Ok(I * 0.25 * C64::new(j0, y0))
}

/// `∇_x Φ(x, y) = −(ik/4) H_1^{(1)}(k|x − y|) (x − y)/|x − y|`.
pub fn grad_phi(k: f64, x: Vec2, y: Vec2) -> Result<CVec2> {
    let (d, r) = separation(x, y)?;
    let (_, j1, _, y1) = jy01(k * r);
    Ok(CVec2::scaled(d, -I * (0.25 * k / r) * C64::new(j1, y1)))
}

/// Incident wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncidentField {
    /// `e^{ik x·d}` with `|d| = 1`.
    PlaneWave { d: Vec2 },
    /// `Φ(x, z)`.
    PointSource { z: Vec2 },
    /// `∇_x Φ(x, z) · a` with `|a| = 1`.
    Dipole { z: Vec2, a: Vec2 },
}

impl IncidentField {
    pub fn plane_wave(angle: f64) -> Self {
        IncidentField::PlaneWave { d: Vec2::polar(1.0, angle) }
    }

    /// Checks that direction vectors are unit length.
    pub fn validate(&self) -> Result<()> {
        let unit = |v: Vec2, what: &str| {
            if (v.norm() - 1.0).abs() > 1e-12 {
                Err(Error::invalid(alloc::format!("{what} must have unit length")))
            } else {
                Ok(())
            }
        };
        match *self {
            IncidentField::PlaneWave { d } => unit(d, "plane-wave direction"),
            IncidentField::PointSource { z } => {
                if z.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("source location must be finite"))
                }
            }
            IncidentField::Dipole { a, .. } => unit(a, "dipole vector"),
        }
    }

    /// Source location for point kinds.
    pub fn source(&self) -> Option<Vec2> {
        match *self {
            IncidentField::PlaneWave { .. } => None,
            IncidentField::PointSource { z } | IncidentField::Dipole { z, .. } => Some(z),
        }
    }

    /// Value and gradient at `x`.
    pub fn eval(&self, k: f64, x: Vec2) -> Result<(C64, CVec2)> {
        match *self {
            IncidentField::PlaneWave { d } => {
                let u = crate::math::cis(k * x.dot(d));
                Ok((u, CVec2::scaled(d, I * k * u)))
            }
            IncidentField::PointSource { z } => {
                let (d, r) = separation(x, z)?;
                let (h0, h1) = hankel01(k * r);
                Ok((I * 0.25 * h0, CVec2::scaled(d, -I * (0.25 * k / r) * h1)))
            }
            IncidentField::Dipole { z, a } => {
                let (d, r) = separation(x, z)?;
                let (h0, h1) = hankel01(k * r);
                let h2 = h1 * (2.0 / (k * r)) - h0;
                let da = d.dot(a);
                let u = -I * (0.25 * k / r) * h1 * da;
                let g = CVec2::scaled(d, I * (0.25 * k * k / (r * r)) * h2 * da)
                    - CVec2::scaled(a, I * (0.25 * k / r) * h1);
                Ok((u, g))
            }
        }
    }

    pub fn value(&self, k: f64, x: Vec2) -> Result<C64> {
        self.eval(k, x).map(|(u, _)| u)
    }
}

/// Convenience wrapper: `incident_eval(f, k, x)`.
pub fn incident_eval(f: &IncidentField, k: f64, x: Vec2) -> Result<(C64, CVec2)> {
    f.eval(k, x)
}

/// First positive zero of `J_0`, located by bisection on [`bessel_j`].
pub fn first_zero_j0() -> f64 {
    crate::math::bisect(|x| bessel_j_seq(0, x)[0], 2.0, 3.0, 1e-15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        assert!(matches!(bessel_y(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(61, 1.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn j0_zero() {
        assert!((first_zero_j0() - 2.404825557695773).abs() < 1e-12);
    }

    #[test]
    fn negative_order_reflection() {
        let a = bessel_j(-3, 2.5).unwrap();
        let b = bessel_j(3, 2.5).unwrap();
        assert_eq!(a, -b);
    }
}
