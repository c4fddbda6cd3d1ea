//! Two-dimensional acoustic transmission scattering.
//!
//! The crate solves the penetrable-obstacle problem
//!
//! ```text
//! Δu + k²u = 0 outside D,   Δv + k²n v = 0 inside D,
//! u = v,  ∂νu = λ ∂νv on ∂D,  u = uⁱ + uˢ with uˢ outgoing,
//! ```
//!
//! three independent ways (boundary integral equations, a Lippmann–Schwinger
//! volume equation and separation of variables on disks), together with
//! interior transmission problems on disks and point-source studies that
//! probe how solution norms behave as a source approaches ∂D.
//!
//! The crate is `no_std` and only needs `alloc`. Elementary functions come
//! from `libm` through `num-traits`. Enable the `parallel` feature to spread
//! point evaluations and per-source solves over a rayon pool; results do not
//! depend on the schedule.

#![no_std]
#![allow(clippy::too_many_arguments, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(any(test, feature = "parallel"))]
extern crate std;

pub mod error;
pub mod fft;
pub mod geometry;
pub mod itp;
pub mod layer;
pub mod linalg;
pub mod math;
pub mod quadrature;
pub mod special;
pub mod transmission;
pub mod uniqueness;

mod par;

pub use error::{Error, Result};
pub use math::{C64, Vec2};
