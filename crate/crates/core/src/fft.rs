//! Iterative radix-2 FFT, one- and two-dimensional.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::math::{C64, PI};

/// Precomputed plan for a power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<C64>,
    rev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let bits = n.trailing_zeros();
        let rev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                C64::new(a.cos(), a.sin())
            })
            .collect();
        Fft { n, twiddles, rev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place transform; `inverse` applies the conjugate transform
    /// without the `1/n` factor.
    pub fn process(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.rev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + len / 2] * w;
                    data[start + k] = a + b;
                    data[start + k + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Square 2D transform on a row-major `n × n` array.
pub fn fft2(plan: &Fft, data: &mut [C64], inverse: bool) {
    let n = plan.len();
    for row in data.chunks_exact_mut(n) {
        plan.process(row, inverse);
    }
    let mut col = alloc::vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        plan.process(&mut col, inverse);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft() {
        let n = 16;
        let x: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), (i * i) as f64 * 0.01)).collect();
        let mut y = x.clone();
        Fft::new(n).process(&mut y, false);
        for k in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                let a = -2.0 * PI * (j * k) as f64 / n as f64;
                s += xj * C64::new(a.cos(), a.sin());
            }
            assert!((s - y[k]).norm() < 1e-12);
        }
        Fft::new(n).process(&mut y, true);
        for k in 0..n {
            assert!((y[k] / n as f64 - x[k]).norm() < 1e-14);
        }
    }
}
