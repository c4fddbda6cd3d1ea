//! Block boundary integral system for constant real index.
//!
//! With `uˢ = SLP_k φ + DLP_k ψ` outside and `λv = SLP_{k₁} φ + DLP_{k₁} ψ`
//! inside (`k₁ = k√n`), the jump relations turn the transmission conditions
//! into
//!
//! ```text
//! (ψ, φ) + L(ψ, φ) = (h f₁, −f₂),
//! L = [[h(K − γK₁), h(S − γS₁)], [T₁ − T, K′₁ − K′]],  h = 2/(1 + γ).
//! ```

use alloc::boxed::Box;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{check_source_outside, Diagnostics, FieldSolution, MediumSpec, Representation, SolverTag};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, Containment, InsideTester};
use crate::layer::{
    assemble_k, assemble_kprime_diff, assemble_s, assemble_t_diff,
    farfield_from_densities, DensityPair, PotentialEvaluator,
};
use crate::linalg::{CMatrix, Lu};
use crate::math::{cnorm, CVec2, Vec2, C64};
use crate::special::IncidentField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BieOptions {
    /// Condition numbers above this are reported as ill-conditioned.
    pub max_condition: f64,
    /// Required relative residual of the solve.
    pub max_residual: f64,
}

impl Default for BieOptions {
    fn default() -> Self {
        BieOptions { max_condition: 1e12, max_residual: 1e-10 }
    }
}

/// Assembled and factorised block system, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct BieSystem {
    grid: BoundaryGrid,
    medium: MediumSpec,
    k1: f64,
    matrix: CMatrix,
    lu: Lu,
    condition: f64,
    options: BieOptions,
}

impl BieSystem {
    pub fn new(grid: &BoundaryGrid, medium: &MediumSpec, options: BieOptions) -> Result<Self> {
        let n = match medium.n.as_constant() {
            Some(n) if n.im == 0.0 => n.re,
            Some(_) => {
                return Err(Error::invalid(
                    "boundary integral solver needs a real index; use sov_solve or ls_solve for absorbing media",
                ))
            }
            None => {
                return Err(Error::invalid(
                    "boundary integral solver needs a constant index; use ls_solve or sov_solve",
                ))
            }
        };
        let k = medium.k;
        let k1 = k * n.sqrt();
        let g = medium.gamma();
        let h = medium.h();
        let nn = grid.len();

        let s = assemble_s(grid, k)?.matrix;
        let s1 = assemble_s(grid, k1)?.matrix;
        let kk = assemble_k(grid, k)?.matrix;
        let kk1 = assemble_k(grid, k1)?.matrix;
        let td = assemble_t_diff(grid, k1, k)?.matrix;
        let kd = assemble_kprime_diff(grid, k1, k)?.matrix;

        let mut a11 = kk;
        a11.add_scaled(C64::new(-g, 0.0), &kk1);
        a11.scale(C64::new(h, 0.0));
        let mut a12 = s;
        a12.add_scaled(C64::new(-g, 0.0), &s1);
        a12.scale(C64::new(h, 0.0));

        let mut a = CMatrix::identity(2 * nn);
        let mut block = CMatrix::zeros(2 * nn, 2 * nn);
        block.set_block(0, 0, &a11);
        block.set_block(0, nn, &a12);
        block.set_block(nn, 0, &td);
        block.set_block(nn, nn, &kd);
        a.add_scaled(C64::new(1.0, 0.0), &block);

        let lu = Lu::new(a.clone()).map_err(|e| match e {
            Error::IllConditioned { cond, .. } => Error::IllConditioned {
                cond,
                hint: "singular block system; suspected interior-eigenvalue pathology of the discretisation".into(),
            },
            e => e,
        })?;
        let condition = lu.condition_estimate();
        if !(condition <= options.max_condition) {
            return Err(Error::IllConditioned {
                cond: condition,
                hint: "block system near-singular; suspected interior-eigenvalue pathology of the discretisation".into(),
            });
        }
        Ok(BieSystem { grid: grid.clone(), medium: medium.clone(), k1, matrix: a, lu, condition, options })
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Densities for general boundary data `w₁ − γw₂ = f₁`, `∂νw₁ − ∂νw₂ = f₂`.
    pub fn solve_data(&self, f1: &[C64], f2: &[C64]) -> Result<(DensityPair, f64)> {
        let n = self.grid.len();
        if f1.len() != n || f2.len() != n {
            return Err(Error::invalid("boundary data length differs from the grid size"));
        }
        let h = self.medium.h();
        let mut rhs: Vec<C64> = f1.iter().map(|v| v * h).collect();
        rhs.extend(f2.iter().map(|v| -v));
        let x = self.lu.solve(&rhs);
        let ax = self.matrix.matvec(&x);
        let r: Vec<C64> = ax.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let bn = cnorm(&rhs);
        let residual = if bn == 0.0 { cnorm(&r) } else { cnorm(&r) / bn };
        if residual > self.options.max_residual {
            return Err(Error::Accuracy(alloc::format!(
                "block solve residual {residual:.3e} exceeds {:.1e}",
                self.options.max_residual
            )));
        }
        let psi = x[..n].to_vec();
        let phi = x[n..].to_vec();
        Ok((DensityPair { psi, phi }, residual))
    }

    /// Scattering data `f₁ = −uⁱ`, `f₂ = −∂νuⁱ` on the grid.
    pub fn incident_data(&self, incident: &IncidentField) -> Result<(Vec<C64>, Vec<C64>)> {
        let k = self.medium.k;
        let mut f1 = Vec::with_capacity(self.grid.len());
        let mut f2 = Vec::with_capacity(self.grid.len());
        for (x, nu) in self.grid.x.iter().zip(&self.grid.normal) {
            let (u, g) = incident.eval(k, *x)?;
            f1.push(-u);
            f2.push(-g.dot(*nu));
        }
        Ok((f1, f2))
    }

    /// Solves the scattering problem for one incident field.
    pub fn solve_incident(&self, incident: &IncidentField, tester: &InsideTester) -> Result<FieldSolution> {
        check_source_outside(incident, |z| tester.classify(z))?;
        let (f1, f2) = self.incident_data(incident)?;
        let (dens, residual) = self.solve_data(&f1, &f2)?;
        Ok(self.field(dens, residual, *incident, tester.clone()))
    }

    /// Wraps densities into an evaluable solution.
    pub fn field(
        &self,
        densities: DensityPair,
        residual: f64,
        incident: IncidentField,
        tester: InsideTester,
    ) -> FieldSolution {
        let ext = PotentialEvaluator::new(&self.grid, &densities, self.medium.k).expect("validated");
        let int = PotentialEvaluator::new(&self.grid, &densities, self.k1).expect("validated");
        let repr = BieField {
            grid: self.grid.clone(),
            densities,
            k: self.medium.k,
            gamma: self.medium.gamma(),
            ext,
            int,
            tester,
        };
        FieldSolution::new(
            SolverTag::Bie,
            self.medium.clone(),
            incident,
            Diagnostics { residual, condition: Some(self.condition), ..Default::default() },
            Box::new(repr),
        )
    }
}

/// Layer representation of a solved transmission problem.
pub(crate) struct BieField {
    grid: BoundaryGrid,
    densities: DensityPair,
    k: f64,
    gamma: f64,
    ext: PotentialEvaluator,
    int: PotentialEvaluator,
    tester: InsideTester,
}

impl Representation for BieField {
    fn region(&self, x: Vec2) -> Containment {
        self.tester.classify(x)
    }

    fn scattered(&self, x: Vec2) -> Result<(C64, CVec2)> {
        self.ext.eval(x)
    }

    fn interior(&self, x: Vec2) -> Result<(C64, CVec2)> {
        let (v, g) = self.int.eval(x)?;
        Ok((v * self.gamma, g * self.gamma))
    }

    fn far_field(&self, m: usize) -> Result<Vec<C64>> {
        Ok(farfield_from_densities(&self.grid, &self.densities, self.k, m)?.samples)
    }
}

/// Solves the transmission problem with constant real `n` by the block
/// boundary integral system on `grid`.
pub fn bie_solve(grid: &BoundaryGrid, medium: &MediumSpec, incident: &IncidentField) -> Result<FieldSolution> {
    let tester = InsideTester::new(grid.curve());
    check_source_outside(incident, |z| tester.classify(z))?;
    let sys = BieSystem::new(grid, medium, BieOptions::default())?;
    sys.solve_incident(incident, &tester)
}
