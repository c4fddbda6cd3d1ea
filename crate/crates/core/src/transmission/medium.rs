use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{Vec2, C64};

/// Refractive index inside the obstacle.
#[derive(Clone)]
pub enum IndexProfile {
    Constant(C64),
    /// Radial polynomial `n(r) = Σ c_i r^i`.
    Radial(Vec<C64>),
    /// General index `n(x)`.
    Custom(Arc<dyn Fn(Vec2) -> C64 + Send + Sync>),
}

impl fmt::Debug for IndexProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexProfile::Constant(n) => write!(f, "Constant({n})"),
            IndexProfile::Radial(c) => write!(f, "Radial({c:?})"),
            IndexProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl IndexProfile {
    pub fn constant(n: f64) -> Self {
        IndexProfile::Constant(C64::new(n, 0.0))
    }

    /// Real radial polynomial from its coefficients in powers of `r`.
    pub fn radial(coeffs: &[f64]) -> Self {
        IndexProfile::Radial(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn eval(&self, x: Vec2) -> C64 {
        match self {
            IndexProfile::Constant(n) => *n,
            IndexProfile::Radial(_) => self.eval_radial(x.norm()).unwrap_or_default(),
            IndexProfile::Custom(f) => f(x),
        }
    }

    /// `n(r)` for profiles that depend only on `|x|`.
    pub fn eval_radial(&self, r: f64) -> Option<C64> {
        match self {
            IndexProfile::Constant(n) => Some(*n),
            IndexProfile::Radial(c) => {
                let mut v = C64::new(0.0, 0.0);
                for coef in c.iter().rev() {
                    v = v * r + coef;
                }
                Some(v)
            }
            IndexProfile::Custom(_) => None,
        }
    }

    pub fn as_constant(&self) -> Option<C64> {
        match self {
            IndexProfile::Constant(n) => Some(*n),
            IndexProfile::Radial(c) if c.iter().skip(1).all(|v| *v == C64::new(0.0, 0.0)) => {
                Some(c.first().copied().unwrap_or_default())
            }
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, IndexProfile::Custom(_))
    }
}

/// Wave number, transmission coefficient and refractive index.
#[derive(Debug, Clone)]
pub struct MediumSpec {
    pub k: f64,
    pub lambda: f64,
    pub n: IndexProfile,
}

impl MediumSpec {
    /// Validates `k > 0`, `λ > 0`, and for constant or radial profiles also
    /// `Re n > 0`, `Im n ≥ 0` on `r ∈ [0, r_check]` samples.
    pub fn new(k: f64, lambda: f64, n: IndexProfile) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(alloc::format!("wave number {k} must be finite and > 0")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Physics(alloc::format!(
                "transmission coefficient λ = {lambda} must be > 0"
            )));
        }
        let m = MediumSpec { k, lambda, n };
        if let Some(c) = m.n.as_constant() {
            check_index(c)?;
        }
        Ok(m)
    }

    /// `γ = 1/λ`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.lambda
    }

    /// `h = 2/(1 + γ)`.
    pub fn h(&self) -> f64 {
        2.0 / (1.0 + self.gamma())
    }

    /// Checks admissibility of `n` at the given points.
    pub fn check_at(&self, points: &[Vec2]) -> Result<()> {
        points.iter().try_for_each(|p| check_index(self.n.eval(*p)))
    }

    /// Checks a radial profile on `[0, radius]`.
    pub fn check_radial(&self, radius: f64) -> Result<()> {
        for i in 0..=256 {
            let r = radius * i as f64 / 256.0;
            if let Some(v) = self.n.eval_radial(r) {
                check_index(v)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_index(n: C64) -> Result<()> {
    if !(n.re.is_finite() && n.im.is_finite()) || n.re <= 0.0 || n.im < 0.0 {
        return Err(Error::Physics(alloc::format!(
            "refractive index {n} violates Re n > 0, Im n ≥ 0"
        )));
    }
    Ok(())
}
