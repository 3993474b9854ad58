//! Jacobi-preconditioned conjugate gradients and BiCGStab on the interior
//! matrix of a [`DiscreteOperator`].

use super::DiscreteOperator;
use crate::{Error, Result};

pub(crate) struct KrylovOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn true_residual(op: &DiscreteOperator, x: &[f64], rhs: &[f64], work: &mut [f64]) -> f64 {
    op.matvec(x, work);
    rhs.iter()
        .zip(work.iter())
        .fold(0.0, |m, (r, w)| m.max((r - w).abs()))
}

/// Solves `M x = rhs` to `||rhs - M x||_inf <= tol * ||rhs||_inf`.
pub(crate) fn solve(
    op: &DiscreteOperator,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<KrylovOutcome> {
    let n = op.len();
    let scale = inf_norm(rhs);
    if scale == 0.0 {
        return Ok(KrylovOutcome {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = tol * scale;
    let out = if op.is_symmetric() {
        cg(op, rhs, target, max_iter)
    } else {
        bicgstab(op, rhs, target, max_iter)
    };
    if out.residual > target {
        return Err(Error::NonConvergence {
            what: if op.is_symmetric() { "conjugate gradient" } else { "BiCGStab" },
            iterations: out.iterations,
            achieved: out.residual / scale,
            target: tol,
        });
    }
    Ok(out)
}

// CG on the positive definite -M.
fn cg(op: &DiscreteOperator, rhs: &[f64], target: f64, max_iter: usize) -> KrylovOutcome {
    let n = op.len();
    let inv_d: Vec<f64> = op.diagonal().iter().map(|d| -1.0 / d).collect();
    let b: Vec<f64> = rhs.iter().map(|v| -v).collect();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_d).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut work = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut residual = inf_norm(&r);
    let mut it = 0;
    while it < max_iter {
        if inf_norm(&r) <= 0.5 * target {
            residual = true_residual(op, &x, rhs, &mut work);
            if residual <= target {
                break;
            }
            // restart from the true residual
            for k in 0..n {
                r[k] = -(rhs[k] - work[k]);
                z[k] = r[k] * inv_d[k];
            }
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
        }
        op.matvec(&p, &mut q);
        for v in q.iter_mut() {
            *v = -*v;
        }
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            break;
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
            z[k] = r[k] * inv_d[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        it += 1;
    }
    if it == max_iter || residual > target {
        residual = true_residual(op, &x, rhs, &mut work);
    }
    KrylovOutcome {
        x,
        iterations: it,
        residual,
    }
}

fn bicgstab(op: &DiscreteOperator, rhs: &[f64], target: f64, max_iter: usize) -> KrylovOutcome {
    let n = op.len();
    let inv_d: Vec<f64> = op.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut r0 = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut work = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut residual = inf_norm(&r);
    let mut it = 0;
    while it < max_iter {
        if inf_norm(&r) <= 0.5 * target {
            residual = true_residual(op, &x, rhs, &mut work);
            if residual <= target {
                break;
            }
            for k in 0..n {
                r[k] = rhs[k] - work[k];
            }
            r0.copy_from_slice(&r);
            p.fill(0.0);
            v.fill(0.0);
            (rho, alpha, omega) = (1.0, 1.0, 1.0);
        }
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            // breakdown: restart with the current residual as shadow
            r0.copy_from_slice(&r);
            p.fill(0.0);
            v.fill(0.0);
            (rho, alpha, omega) = (1.0, 1.0, 1.0);
            it += 1;
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
            ph[k] = p[k] * inv_d[k];
        }
        op.matvec(&ph, &mut v);
        alpha = rho / dot(&r0, &v);
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
            sh[k] = s[k] * inv_d[k];
        }
        op.matvec(&sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for k in 0..n {
            x[k] += alpha * ph[k] + omega * sh[k];
            r[k] = s[k] - omega * t[k];
        }
        it += 1;
        if omega == 0.0 {
            r0.copy_from_slice(&r);
            p.fill(0.0);
            v.fill(0.0);
            (rho, alpha, omega) = (1.0, 1.0, 1.0);
        }
    }
    if it == max_iter || residual > target {
        residual = true_residual(op, &x, rhs, &mut work);
    }
    KrylovOutcome {
        x,
        iterations: it,
        residual,
    }
}
