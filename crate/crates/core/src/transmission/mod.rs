//! The transmission scattering problem
//!
//! ```text
//! Δu + k²u = 0 in ℝ² \ D̄,  Δv + k²n v = 0 in D,
//! u − v = 0,  ∂νu − λ∂νv = 0 on ∂D,
//! ```
//!
//! solved by a boundary integral system (constant real `n`), the
//! Lippmann–Schwinger volume equation (`λ = 1`, general `n`), and
//! separation of variables on disks (radial `n`, any `λ`).
//!
//! The integral and modal solvers work with the pair
//! `(w₁, w₂) = (uˢ, λv)`, which satisfies `w₁ − γw₂ = f₁` and
//! `∂νw₁ − ∂νw₂ = f₂` with `γ = 1/λ`. For scattering of `uⁱ` the data are
//! `f₁ = −uⁱ`, `f₂ = −∂νuⁱ`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Containment;
use crate::math::{CVec2, Vec2, C64};
use crate::special::IncidentField;

pub mod bie;
pub mod farfield;
pub mod ls;
pub mod medium;
pub mod sov;

pub use bie::{bie_solve, BieOptions, BieSystem};
pub use farfield::FarField;
pub use ls::{ls_solve, LsOperator, LsOptions, LsSolution};
pub use medium::{IndexProfile, MediumSpec};
pub use sov::{sov_solve, two_step_modes, two_step_variable_n, SovOptions, SovSolution, SovSolver};

/// Which solver produced a [`FieldSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    Bie,
    Ls,
    Sov,
}

/// Solver residuals and conditioning, recorded for audit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Relative residual of the final linear solve.
    pub residual: f64,
    /// Condition-number estimate of the system, when available.
    pub condition: Option<f64>,
    /// Largest relative mode coefficient beyond the cutoff (modal solver).
    pub truncation_tail: Option<f64>,
    pub iterations: Option<usize>,
    pub warnings: Vec<String>,
}

/// Value and gradient of a field at one point, with the region it lies in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub region: Containment,
    pub value: C64,
    pub gradient: CVec2,
}

pub(crate) trait Representation: Send + Sync {
    fn region(&self, x: Vec2) -> Containment;
    fn scattered(&self, x: Vec2) -> Result<(C64, CVec2)>;
    fn interior(&self, x: Vec2) -> Result<(C64, CVec2)>;
    fn far_field(&self, m: usize) -> Result<Vec<C64>>;
}

/// Evaluable solution of one scattering problem.
pub struct FieldSolution {
    pub tag: SolverTag,
    pub medium: MediumSpec,
    pub incident: IncidentField,
    pub diagnostics: Diagnostics,
    repr: alloc::boxed::Box<dyn Representation>,
}

impl core::fmt::Debug for FieldSolution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FieldSolution")
            .field("tag", &self.tag)
            .field("medium", &self.medium)
            .field("incident", &self.incident)
            .field("diagnostics", &self.diagnostics)
            .finish()
    }
}

impl FieldSolution {
    pub(crate) fn new(
        tag: SolverTag,
        medium: MediumSpec,
        incident: IncidentField,
        diagnostics: Diagnostics,
        repr: alloc::boxed::Box<dyn Representation>,
    ) -> Self {
        FieldSolution { tag, medium, incident, diagnostics, repr }
    }

    pub fn region(&self, x: Vec2) -> Containment {
        self.repr.region(x)
    }

    /// Scattered field `uˢ` and its gradient outside `D`.
    pub fn scattered(&self, x: Vec2) -> Result<(C64, CVec2)> {
        match self.region(x) {
            Containment::Outside => self.repr.scattered(x),
            _ => Err(Error::Domain("scattered field requested at a point not outside D".into())),
        }
    }

    /// Interior field `v` and its gradient inside `D`.
    pub fn interior(&self, x: Vec2) -> Result<(C64, CVec2)> {
        match self.region(x) {
            Containment::Inside => self.repr.interior(x),
            _ => Err(Error::Domain("interior field requested at a point not inside D".into())),
        }
    }

    /// Total field: `uⁱ + uˢ` outside, `v` inside.
    pub fn total(&self, x: Vec2) -> Result<FieldValue> {
        let region = self.region(x);
        let (value, gradient) = match region {
            Containment::Outside => {
                let (us, gs) = self.repr.scattered(x)?;
                let (ui, gi) = self.incident.eval(self.medium.k, x)?;
                (us + ui, gs + gi)
            }
            Containment::Inside => self.repr.interior(x)?,
            Containment::NearBoundary => {
                return Err(Error::Domain("point lies on the boundary within tolerance".into()))
            }
        };
        Ok(FieldValue { region, value, gradient })
    }

    /// Batch evaluation of [`FieldSolution::total`], in input order.
    pub fn eval_points(&self, points: &[Vec2]) -> Vec<Result<FieldValue>> {
        crate::par::map(points.len(), |i| self.total(points[i]).map_err(|e| e.at(i)))
    }

    /// Far-field pattern at `m` equispaced angles.
    pub fn far_field(&self, m: usize) -> Result<FarField> {
        FarField::new(self.repr.far_field(m)?, self.medium.k, Some(self.incident))
    }
}

/// `farfield(sol, M)`.
pub fn farfield(sol: &FieldSolution, m: usize) -> Result<FarField> {
    sol.far_field(m)
}

/// Checks that a point source lies strictly outside the obstacle.
pub(crate) fn check_source_outside(
    incident: &IncidentField,
    classify: impl Fn(Vec2) -> Containment,
) -> Result<()> {
    incident.validate()?;
    if let Some(z) = incident.source() {
        if classify(z) != Containment::Outside {
            return Err(Error::invalid("point or dipole source must lie strictly outside D"));
        }
    }
    Ok(())
}
