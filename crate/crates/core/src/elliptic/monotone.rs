use super::{BandedLu, BoundaryData, DiscreteOperator, NonlinearitySpec, ScalarField};
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotoneOptions {
    /// Target for the estimated distance `||u_k - u||_inf` to the limit.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Allowed defect of the sub- and supersolution inequalities.
    pub tol_feas: f64,
    /// Also iterate upward from the subsolution and report the gap.
    pub upward_pass: bool,
    /// Factor applied to the sampled Lipschitz bound.
    pub lipschitz_inflation: f64,
    /// Extra value included in the Lipschitz sampling range (the inner
    /// boundary value of a ring).
    pub range_top: Option<f64>,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        MonotoneOptions {
            tol: 1e-8,
            max_sweeps: 20_000,
            tol_feas: 1e-6,
            upward_pass: true,
            lipschitz_inflation: 1.5,
            range_top: None,
        }
    }
}

/// Extreme defects of the sub- and supersolution inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feasibility {
    /// `min (L sub + f(sub))`; must be `>= -tol_feas`.
    pub sub_min: f64,
    /// `max (L super + f(super))`; must be `<= tol_feas`.
    pub super_max: f64,
}

#[derive(Clone, Debug)]
pub struct MonotoneResult {
    /// Limit of the downward iteration from the supersolution.
    pub u: ScalarField,
    pub sweeps: usize,
    /// `max |L u + f(u)| / |diag L|` at the last sweep.
    pub residual: f64,
    /// Shift `K` used in `(K - L) u_{k+1} = f(u_k) + K u_k`.
    pub shift: f64,
    pub feasibility: Feasibility,
    /// `min_k min (u_k - sub)` over all downward sweeps.
    pub min_margin_sub: f64,
    /// `min_k min (super - u_k)` over all downward sweeps.
    pub min_margin_super: f64,
    pub upward: Option<ScalarField>,
    pub upward_sweeps: usize,
    /// `||u_down - u_up||_inf` when the upward pass ran.
    pub uniqueness_gap: Option<f64>,
}

pub fn feasibility_residuals(
    op: &DiscreteOperator,
    f: &NonlinearitySpec,
    sub: &ScalarField,
    sup: &ScalarField,
    bc: BoundaryData,
) -> Feasibility {
    let points = op.domain().points();
    let defect = |u: &ScalarField| -> Vec<f64> {
        let mut r = op.apply(u.values(), bc);
        for (k, v) in r.iter_mut().enumerate() {
            *v += f.eval(points[k], u.values()[k]);
        }
        r
    };
    Feasibility {
        sub_min: defect(sub).into_iter().fold(f64::INFINITY, f64::min),
        super_max: defect(sup).into_iter().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Monotone iteration for `L u + f(x, u) = 0`, `u = bc` on the boundary,
/// between an ordered pair of sub- and supersolutions.
pub fn monotone_semilinear_solve(
    op: &DiscreteOperator,
    f: &NonlinearitySpec,
    sub: &ScalarField,
    sup: &ScalarField,
    bc: BoundaryData,
    opts: &MonotoneOptions,
) -> Result<MonotoneResult> {
    let n = op.len();
    if sub.len() != n || sup.len() != n {
        return Err(Error::invalid("bracket fields do not match the operator"));
    }
    let domain = op.domain().clone();
    if let Some(k) = (0..n).find(|&k| sub.values()[k] > sup.values()[k]) {
        let node = domain.node(k);
        return Err(Error::BracketViolation {
            i: node.i as i64,
            j: node.j as i64,
            sweep: 0,
            detail: format!(
                "sub {} exceeds super {}",
                sub.values()[k],
                sup.values()[k]
            ),
        });
    }
    let has_inner = (0..n).any(|k| op.boundary_weights(k)[1] != 0.0);
    let mut comps = vec![("outer", sub.boundary().outer, bc.outer, sup.boundary().outer)];
    if has_inner {
        comps.push(("inner", sub.boundary().inner, bc.inner, sup.boundary().inner));
    }
    for (name, lo, mid, hi) in comps {
        if !(lo <= mid && mid <= hi) {
            return Err(Error::invalid(format!(
                "boundary ordering fails on the {name} component: {lo} <= {mid} <= {hi}"
            )));
        }
    }
    let feasibility = feasibility_residuals(op, f, sub, sup, bc);
    if feasibility.sub_min < -opts.tol_feas {
        return Err(Error::invalid(format!(
            "subsolution inequality violated by {:.3e}",
            -feasibility.sub_min
        )));
    }
    if feasibility.super_max > opts.tol_feas {
        return Err(Error::invalid(format!(
            "supersolution inequality violated by {:.3e}",
            feasibility.super_max
        )));
    }

    let points = domain.points();
    let lo = sub.min().min(bc.outer);
    let mut hi = sup.max().max(bc.outer);
    if has_inner {
        hi = hi.max(bc.inner);
    }
    if let Some(m) = opts.range_top {
        hi = hi.max(m);
    }
    let shift = opts.lipschitz_inflation * f.lipschitz_estimate(lo, hi, &sample_points(&points));
    let lu = BandedLu::factor(op, -1.0, &vec![shift; n])?;
    let boundary = op.boundary_term(bc);
    let scale = sup.max().abs().max(sub.min().abs()).max(1.0);
    let diag = op.diagonal();
    let slack = opts.tol_feas / shift.max(1.0) + 1e-11 * scale;

    let run = |start: &ScalarField, downward: bool| -> Result<(Vec<f64>, usize, f64, f64, f64)> {
        let mut u = start.values().to_vec();
        let mut min_sub = f64::INFINITY;
        let mut min_super = f64::INFINITY;
        let mut residual = f64::INFINITY;
        let mut lu_buf = vec![0.0; n];
        let mut sweeps = 0;
        let mut prev_step = f64::INFINITY;
        let mut error = f64::INFINITY;
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let mut next: Vec<f64> = (0..n)
                .map(|k| f.eval(points[k], u[k]) + shift * u[k] + boundary[k])
                .collect();
            lu.solve_in_place(&mut next);
            for k in 0..n {
                let below = next[k] - sub.values()[k];
                let above = sup.values()[k] - next[k];
                let step = if downward { next[k] - u[k] } else { u[k] - next[k] };
                min_sub = min_sub.min(below);
                min_super = min_super.min(above);
                if below < -slack || above < -slack || step > slack {
                    let node = domain.node(k);
                    return Err(Error::BracketViolation {
                        i: node.i as i64,
                        j: node.j as i64,
                        sweep: sweeps,
                        detail: format!(
                            "sub {:.12e}, iterate {:.12e}, previous {:.12e}, super {:.12e}",
                            sub.values()[k],
                            next[k],
                            u[k],
                            sup.values()[k]
                        ),
                    });
                }
            }
            let step = (0..n).fold(0.0, |m: f64, k| m.max((next[k] - u[k]).abs()));
            // a posteriori bound from the observed contraction rate
            let rate = step / prev_step;
            error = if step == 0.0 {
                0.0
            } else if prev_step.is_finite() && rate < 1.0 {
                step * rate / (1.0 - rate)
            } else {
                f64::INFINITY
            };
            prev_step = step;
            u = next;
            op.matvec(&u, &mut lu_buf);
            // residual scaled by the diagonal, in units of u
            residual = (0..n).fold(0.0, |m, k| {
                let r = lu_buf[k] + boundary[k] + f.eval(points[k], u[k]);
                m.max(r.abs() / diag[k].abs())
            });
            if error <= opts.tol {
                break;
            }
        }
        if error > opts.tol {
            return Err(Error::NonConvergence {
                what: "monotone iteration",
                iterations: sweeps,
                achieved: error,
                target: opts.tol,
            });
        }
        Ok((u, sweeps, residual, min_sub, min_super))
    };

    let (down, sweeps, residual, min_margin_sub, min_margin_super) = run(sup, true)?;
    let u = ScalarField::new(domain.clone(), down, bc)?;
    let (upward, upward_sweeps, uniqueness_gap) = if opts.upward_pass {
        let (up, s, _, _, _) = run(sub, false)?;
        let up = ScalarField::new(domain.clone(), up, bc)?;
        let gap = u.max_abs_diff(&up);
        (Some(up), s, Some(gap))
    } else {
        (None, 0, None)
    };
    Ok(MonotoneResult {
        u,
        sweeps,
        residual,
        shift,
        feasibility,
        min_margin_sub,
        min_margin_super,
        upward,
        upward_sweeps,
        uniqueness_gap,
    })
}

fn sample_points(points: &[Point]) -> Vec<Point> {
    let stride = (points.len() / 64).max(1);
    points.iter().step_by(stride).copied().collect()
}
