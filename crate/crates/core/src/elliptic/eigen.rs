use std::sync::Arc;

use super::{assemble_operator, BandedLu, BoundaryData, CoefficientField, DiscreteOperator, ScalarField};
use crate::geometry::GridDomain;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Target for `||(-L - zeta - lambda) phi||_inf / ||phi||_inf`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

/// Principal Dirichlet eigenpair of `-(L + zeta)`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda1: f64,
    /// Positive eigenfunction with `max phi = 1`.
    pub phi: ScalarField,
    pub residual: f64,
    pub iterations: usize,
}

pub fn principal_eigenpair(
    domain: &Arc<GridDomain>,
    coeffs: &CoefficientField,
    zeta: Option<&ScalarField>,
) -> Result<EigenPair> {
    let op = assemble_operator(domain, coeffs)?;
    let z = match zeta {
        Some(z) => z.values().to_vec(),
        None => vec![0.0; op.len()],
    };
    principal_eigenpair_of(&op, &z, &EigenOptions::default())
}

/// Shifted inverse power iteration on `-(M + zeta) + sigma`, with
/// `sigma = max zeta` so the factored matrix stays an M-matrix.
pub fn principal_eigenpair_of(
    op: &DiscreteOperator,
    zeta: &[f64],
    opts: &EigenOptions,
) -> Result<EigenPair> {
    let n = op.len();
    if zeta.len() != n {
        return Err(Error::invalid("zeroth-order field length does not match the operator"));
    }
    if zeta.iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("zeroth-order field must be bounded"));
    }
    let sigma = zeta.iter().copied().fold(0.0, f64::max);
    let shift: Vec<f64> = zeta.iter().map(|z| sigma - z).collect();
    let lu = BandedLu::factor(op, -1.0, &shift)?;

    let apply_k = |phi: &[f64], out: &mut Vec<f64>| {
        op.matvec(phi, out);
        for k in 0..n {
            out[k] = -out[k] - zeta[k] * phi[k];
        }
    };

    let mut phi = vec![1.0; n];
    let mut kphi = vec![0.0; n];
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        lu.solve_in_place(&mut phi);
        let m = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(m > 0.0) {
            return Err(Error::invalid("inverse iteration lost positivity"));
        }
        for v in phi.iter_mut() {
            *v /= m;
        }
        apply_k(&phi, &mut kphi);
        let num: f64 = phi.iter().zip(&kphi).map(|(a, b)| a * b).sum();
        let den: f64 = phi.iter().map(|a| a * a).sum();
        lambda = num / den;
        residual = phi
            .iter()
            .zip(&kphi)
            .fold(0.0, |r, (p, kp)| r.max((kp - lambda * p).abs()));
        if residual <= opts.tol {
            break;
        }
        if residual < 0.999 * best {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > 200 {
                break;
            }
        }
    }
    if residual > opts.tol {
        return Err(Error::NonConvergence {
            what: "inverse power iteration",
            iterations,
            achieved: residual,
            target: opts.tol,
        });
    }
    if let Some(k) = phi.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::invalid(format!(
            "principal eigenfunction is not positive at node {k}"
        )));
    }
    Ok(EigenPair {
        lambda1: lambda,
        phi: ScalarField::new(op.domain().clone(), phi, BoundaryData::ZERO)?,
        residual,
        iterations,
    })
}
