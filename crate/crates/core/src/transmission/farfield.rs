use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{cis, C64, TAU};
use crate::special::IncidentField;

/// Far-field pattern sampled at `M` equispaced angles `2πi/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub samples: Vec<C64>,
    pub k: f64,
    pub incident: Option<IncidentField>,
}

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 64;

impl FarField {
    pub fn new(samples: Vec<C64>, k: f64, incident: Option<IncidentField>) -> Result<Self> {
        let m = samples.len();
        if m < MIN_SAMPLES || !m.is_multiple_of(2) {
            return Err(Error::invalid(alloc::format!(
                "far-field sample count must be even and ≥ {MIN_SAMPLES}, got {m}"
            )));
        }
        Ok(FarField { samples, k, incident })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn angle(&self, i: usize) -> f64 {
        TAU * i as f64 / self.len() as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.angle(i)).collect()
    }

    /// `∫_{S¹} |u∞|² ds`, exact for band-limited patterns.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * TAU / self.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fourier coefficient `c_m` with `u∞(θ) = Σ c_m e^{imθ}`, `|m| < M/2`.
    pub fn fourier(&self, m: i64) -> C64 {
        let n = self.len();
        let mut s = C64::new(0.0, 0.0);
        for (j, v) in self.samples.iter().enumerate() {
            s += v * cis(-(m as f64) * TAU * j as f64 / n as f64);
        }
        s / n as f64
    }

    /// Trigonometric interpolation at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> C64 {
        let n = self.len() as i64;
        let mut v = C64::new(0.0, 0.0);
        for m in -(n / 2 - 1)..n / 2 {
            v += self.fourier(m) * cis(m as f64 * theta);
        }
        v += self.fourier(n / 2) * (n as f64 / 2.0 * theta).cos();
        v
    }

    /// Relative discrete L² distance `‖self − other‖/‖other‖`.
    pub fn rel_l2(&self, other: &FarField) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::invalid("far fields are sampled at different counts"));
        }
        Ok(crate::math::rel_l2(&self.samples, &other.samples))
    }

    /// Rows `(angle, Re, Im)` for serialisation.
    pub fn rows(&self) -> Vec<[f64; 3]> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, z)| [self.angle(i), z.re, z.im])
            .collect()
    }
}
