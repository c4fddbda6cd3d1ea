//! Dense complex matrices, LU factorisation with partial pivoting, a 1-norm
//! condition estimate, restarted GMRES and a tridiagonal solver.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{cnorm, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        CMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(ZERO, |s, (a, b)| s + a * b))
            .collect()
    }

    pub fn scale(&mut self, s: C64) {
        for v in self.data.iter_mut() {
            *v *= s;
        }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, s: C64, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Copies `block` into the sub-matrix starting at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        for i in 0..block.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + block.cols];
            dst.copy_from_slice(block.row(i));
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors `PA = LU` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl Lu {
    /// Factorises `a`. A zero pivot yields an ill-conditioned error.
    pub fn new(a: CMatrix) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let norm_one = a.norm_one();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::IllConditioned {
                    cond: f64::INFINITY,
                    hint: alloc::format!("exactly singular matrix (zero pivot in column {k})"),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let inv = ONE / lu[(k, k)];
            let (head, tail) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n + k + 1..k * n + n];
            for row in tail.chunks_exact_mut(n) {
                let f = row[k] * inv;
                row[k] = f;
                if f == ZERO {
                    continue;
                }
                for (x, y) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
        Ok(Lu { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = row[..i].iter().zip(&x[..i]).fold(ZERO, |s, (a, b)| s + a * b);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = row[i + 1..].iter().zip(&x[i + 1..]).fold(ZERO, |s, (a, b)| s + a * b);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        // Aᴴ = Uᴴ Lᴴ P, so solve Uᴴ y = b, Lᴴ z = y, x = Pᵀ z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[(k, i)].conj() * y[k];
            }
            y[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu[(k, i)].conj() * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// Estimate of the 1-norm condition number (Hager–Higham iteration).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let new_est: f64 = y.iter().map(|z| z.norm()).sum();
            if !new_est.is_finite() {
                return f64::INFINITY;
            }
            let s: Vec<C64> = y
                .iter()
                .map(|z| if z.norm() > 0.0 { z / z.norm() } else { ONE })
                .collect();
            let w = self.solve_adjoint(&s);
            let (jmax, wmax) = w
                .iter()
                .enumerate()
                .map(|(j, z)| (j, z.norm()))
                .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
            let zx: f64 = w.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if new_est <= est || wmax <= zx {
                est = est.max(new_est);
                break;
            }
            est = new_est;
            x = vec![ZERO; n];
            x[jmax] = ONE;
        }
        // Alternative lower bound from an oscillating vector.
        let alt: Vec<C64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                C64::new(s * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|z| z.norm()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est) * self.norm_one
    }
}

/// Restarted GMRES for `A x = b` with `A` given as a closure. Returns the
/// solution and the final relative residual.
pub fn gmres(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    x0: Option<&[C64]>,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<(Vec<C64>, f64)> {
    let n = b.len();
    let bnorm = cnorm(b);
    if bnorm == 0.0 {
        return Ok((vec![ZERO; n], 0.0));
    }
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![ZERO; n]);
    let mut total = 0;
    loop {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = cnorm(&r);
        if beta / bnorm <= tol {
            return Ok((x, beta / bnorm));
        }
        if total >= max_iter {
            return Err(Error::NoConvergence(alloc::format!(
                "GMRES residual {:.3e} after {total} iterations",
                beta / bnorm
            )));
        }
        let m = restart;
        let mut v: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|z| z / beta).collect());
        let mut h = vec![vec![ZERO; m]; m + 1];
        let mut cs = vec![ZERO; m];
        let mut sn = vec![ZERO; m];
        let mut g = vec![ZERO; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..m {
            let mut w = apply(&v[j]);
            for i in 0..=j {
                let hij = v[i].iter().zip(&w).fold(ZERO, |s, (a, b)| s + a.conj() * b);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= hij * vk;
                }
            }
            let wn = cnorm(&w);
            h[j + 1][j] = C64::new(wn, 0.0);
            for i in 0..j {
                let t = cs[i].conj() * h[i][j] + sn[i].conj() * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let a = h[j][j];
            let bb = h[j + 1][j];
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if den == 0.0 {
                cs[j] = ONE;
                sn[j] = ZERO;
            } else {
                cs[j] = a / den;
                sn[j] = bb / den;
            }
            h[j][j] = cs[j].conj() * a + sn[j].conj() * bb;
            h[j + 1][j] = ZERO;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            used = j + 1;
            total += 1;
            if g[j + 1].norm() / bnorm <= tol * 0.5 || wn == 0.0 || total >= max_iter {
                break;
            }
            v.push(w.iter().map(|z| z / wn).collect());
        }
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v[k]) {
                *xi += yk * vi;
            }
        }
    }
}

/// Solves a tridiagonal system with sub-, main and super-diagonals
/// `a`, `b`, `c` (Thomas algorithm, no pivoting).
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = if i + 1 < n { c[i] / m } else { 0.0 };
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Solves a small complex system by LU; convenience for per-mode matching.
pub fn solve_dense(a: CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    Ok(Lu::new(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 4.0 } else { 0.0 };
            C64::new(d + ((i * 7 + j * 3) % 5) as f64 * 0.1, ((i + 2 * j) % 3) as f64 * 0.2 - 0.2)
        })
    }

    #[test]
    fn lu_roundtrip() {
        let a = test_matrix(12);
        let x: Vec<C64> = (0..12).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let b = a.matvec(&x);
        let lu = Lu::new(a.clone()).unwrap();
        let y = lu.solve(&b);
        assert!(crate::math::rel_l2(&y, &x) < 1e-13);
        // Adjoint solve against explicit adjoint product.
        let ah = CMatrix::from_fn(12, 12, |i, j| a[(j, i)].conj());
        let z = lu.solve_adjoint(&ah.matvec(&x));
        assert!(crate::math::rel_l2(&z, &x) < 1e-13);
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let mut a = CMatrix::identity(6);
        a[(3, 3)] = C64::new(1e-6, 0.0);
        let c = Lu::new(a).unwrap().condition_estimate();
        assert!((c - 1e6).abs() / 1e6 < 1e-10);
    }

    #[test]
    fn gmres_matches_lu() {
        let a = test_matrix(30);
        let b: Vec<C64> = (0..30).map(|i| C64::new(1.0, i as f64 * 0.1)).collect();
        let (x, res) = gmres(|v| a.matvec(v), &b, None, 1e-12, 10, 500).unwrap();
        assert!(res < 1e-12);
        let y = Lu::new(a).unwrap().solve(&b);
        assert!(crate::math::rel_l2(&x, &y) < 1e-10);
    }

    #[test]
    fn tridiagonal() {
        let a = [0.0, 1.0, 1.0, 1.0];
        let b = [4.0, 4.0, 4.0, 4.0];
        let c = [1.0, 1.0, 1.0, 0.0];
        let x = [1.0, 2.0, 3.0, 4.0];
        let d: Vec<f64> = (0..4)
            .map(|i| b[i] * x[i] + if i > 0 { a[i] * x[i - 1] } else { 0.0 } + if i < 3 { c[i] * x[i + 1] } else { 0.0 })
            .collect();
        let y = solve_tridiagonal(&a, &b, &c, &d);
        for i in 0..4 {
            assert!((y[i] - x[i]).abs() < 1e-14);
        }
    }
}
