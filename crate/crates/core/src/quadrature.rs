//! Gauss–Legendre rules, the periodic log-singular product weights and
//! Chebyshev collocation.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::math::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    (
        x.iter().map(|t| m + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

/// Weights `R_j`, `j = 0..N`, of the product rule
/// `∫₀^{2π} ln(4 sin²((t−τ)/2)) f(τ) dτ ≈ Σ_j R_{|i−j|} f(t_j)` on `N = 2n`
/// equispaced nodes.
pub fn log_weights(big_n: usize) -> Vec<f64> {
    let n = big_n / 2;
    let nf = n as f64;
    (0..big_n)
        .map(|j| {
            let tj = PI * j as f64 / nf;
            let mut s = 0.0;
            for m in 1..n {
                s += (m as f64 * tj).cos() / m as f64;
            }
            -2.0 * PI / nf * s - PI / (nf * nf) * (nf * tj).cos()
        })
        .collect()
}

/// Chebyshev–Gauss–Lobatto points `cos(πj/n)`, `j = 0..=n` (descending from
/// 1 to −1) and the differentiation matrix, row-major.
pub fn chebyshev(n: usize) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let m = n + 1;
    let cw = |j: usize| {
        let base = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j.is_multiple_of(2) {
            base
        } else {
            -base
        }
    };
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            if i != j {
                let v = cw(i) / cw(j) / (x[i] - x[j]);
                d[i * m + j] = v;
                row += v;
            }
        }
        // Negative-sum trick keeps the diagonal consistent with constants.
        d[i * m + i] = -row;
    }
    (x, d)
}

/// Clenshaw–Curtis weights on the Chebyshev–Lobatto points of [`chebyshev`].
pub fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    for (j, wj) in w.iter_mut().enumerate() {
        let theta = PI * j as f64 / nf;
        let mut s = 0.0;
        for k in 0..=n / 2 {
            let b = if k == 0 || (n.is_multiple_of(2) && k == n / 2) { 1.0 } else { 2.0 };
            let kf = k as f64;
            s += b / (1.0 - 4.0 * kf * kf) * (2.0 * kf * theta).cos();
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        *wj = c / nf * s;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_weights_integrate_constant() {
        // ∫ ln(4 sin²(τ/2)) dτ = 0 over a period.
        let r = log_weights(32);
        assert!(r.iter().sum::<f64>().abs() < 1e-13);
    }

    #[test]
    fn chebyshev_differentiates() {
        let (x, d) = chebyshev(20);
        let m = x.len();
        for i in 0..m {
            let s: f64 = (0..m).map(|j| d[i * m + j] * x[j].sin()).sum();
            assert!((s - x[i].cos()).abs() < 1e-12);
        }
        let w = clenshaw_curtis(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((s - (1f64.exp() - (-1f64).exp())).abs() < 1e-14);
    }
}
