//! Finite-difference elliptic kernel: operator assembly on cut-cell
//! grids, linear solves, principal eigenpairs and monotone iteration for
//! semilinear problems `L u + f(x, u) = 0`.

mod banded;
mod coeffs;
mod eigen;
mod field;
mod krylov;
mod monotone;
mod nonlinearity;
mod operator;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use banded::BandedLu;
pub use coeffs::{Affine, CoefficientField};
pub use eigen::{principal_eigenpair, principal_eigenpair_of, EigenOptions, EigenPair};
pub use field::{BoundaryData, ScalarField};
pub use monotone::{
    feasibility_residuals, monotone_semilinear_solve, Feasibility, MonotoneOptions,
    MonotoneResult,
};
pub use nonlinearity::{CustomNonlinearity, NonlinearitySpec};
pub use operator::{
    assemble_operator, assemble_operator_with, BoundaryScheme, DiscreteOperator, DriftScheme,
};

use crate::geometry::GridDomain;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearMethod {
    /// CG for symmetric operators, BiCGStab otherwise.
    #[default]
    Krylov,
    /// Banded LU.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearOptions {
    /// Relative infinity-norm residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub method: LinearMethod,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions {
            tol: 1e-10,
            max_iter: 20_000,
            method: LinearMethod::Krylov,
        }
    }
}

/// Solves `L u = rhs` with Dirichlet data `bc`.
pub fn solve_linear_system(
    op: &DiscreteOperator,
    rhs: &ScalarField,
    bc: BoundaryData,
) -> Result<ScalarField> {
    solve_linear_system_with(op, rhs, bc, &LinearOptions::default())
}

pub fn solve_linear_system_with(
    op: &DiscreteOperator,
    rhs: &ScalarField,
    bc: BoundaryData,
    opts: &LinearOptions,
) -> Result<ScalarField> {
    if !Arc::ptr_eq(op.domain(), rhs.domain()) && !op.domain().same_lattice(rhs.domain()) {
        return Err(Error::invalid("operator and right-hand side live on different domains"));
    }
    if rhs.len() != op.len() {
        return Err(Error::invalid("right-hand side length does not match the operator"));
    }
    let b = op.boundary_term(bc);
    let r: Vec<f64> = rhs.values().iter().zip(&b).map(|(f, g)| f - g).collect();
    let x = match opts.method {
        LinearMethod::Krylov => krylov::solve(op, &r, opts.tol, opts.max_iter)?.x,
        LinearMethod::Direct => {
            let lu = BandedLu::factor(op, 1.0, &vec![0.0; op.len()])?;
            let x = lu.solve(&r);
            let res = residual_inf(op, &x, &r);
            let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if res > opts.tol * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NonConvergence {
                    what: "banded LU",
                    iterations: 1,
                    achieved: res / scale,
                    target: opts.tol,
                });
            }
            x
        }
    };
    ScalarField::new(op.domain().clone(), x, bc)
}

fn residual_inf(op: &DiscreteOperator, x: &[f64], r: &[f64]) -> f64 {
    let mut mx = vec![0.0; x.len()];
    op.matvec(x, &mut mx);
    mx.iter().zip(r).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Torsion function: `L v = -1` with zero boundary data.
pub fn solve_torsion(domain: &Arc<GridDomain>, coeffs: &CoefficientField) -> Result<ScalarField> {
    solve_torsion_with(
        domain,
        coeffs,
        BoundaryScheme::ShortleyWeller,
        &LinearOptions::default(),
    )
}

pub fn solve_torsion_with(
    domain: &Arc<GridDomain>,
    coeffs: &CoefficientField,
    scheme: BoundaryScheme,
    opts: &LinearOptions,
) -> Result<ScalarField> {
    let op = assemble_operator_with(domain, coeffs, scheme)?;
    let rhs = ScalarField::new(domain.clone(), vec![-1.0; op.len()], BoundaryData::ZERO)?;
    solve_linear_system_with(&op, &rhs, BoundaryData::ZERO, opts)
}
