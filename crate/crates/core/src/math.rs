//! Small numeric vocabulary shared by every module.

use core::ops::{Add, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;
/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn polar(r: f64, theta: f64) -> Self {
        Vec2::new(r * theta.cos(), r * theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotation by −90°, which turns a counter-clockwise tangent into the
    /// outward normal direction.
    #[inline]
    pub fn rot_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Complex vector in the plane, used for gradients of complex fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec2 {
    pub x: C64,
    pub y: C64,
}

impl CVec2 {
    pub const ZERO: CVec2 = CVec2 {
        x: C64 { re: 0.0, im: 0.0 },
        y: C64 { re: 0.0, im: 0.0 },
    };

    #[inline]
    pub fn new(x: C64, y: C64) -> Self {
        CVec2 { x, y }
    }

    #[inline]
    pub fn scaled(v: Vec2, s: C64) -> Self {
        CVec2::new(s * v.x, s * v.y)
    }

    /// Bilinear pairing with a real vector (no conjugation).
    #[inline]
    pub fn dot(self, v: Vec2) -> C64 {
        self.x * v.x + self.y * v.y
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr()
    }
}

impl Add for CVec2 {
    type Output = CVec2;
    #[inline]
    fn add(self, o: CVec2) -> CVec2 {
        CVec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for CVec2 {
    type Output = CVec2;
    #[inline]
    fn sub(self, o: CVec2) -> CVec2 {
        CVec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<C64> for CVec2 {
    type Output = CVec2;
    #[inline]
    fn mul(self, s: C64) -> CVec2 {
        CVec2::new(self.x * s, self.y * s)
    }
}

impl Mul<f64> for CVec2 {
    type Output = CVec2;
    #[inline]
    fn mul(self, s: f64) -> CVec2 {
        CVec2::new(self.x * s, self.y * s)
    }
}

/// Euclidean norm of a complex vector.
pub fn cnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn cnorm_inf(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖a − b‖₂ / ‖b‖₂.
pub fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// `exp(i θ)`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Bisection on a bracketing interval; returns the midpoint once the
/// interval is below `tol` or no further halving is possible.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
