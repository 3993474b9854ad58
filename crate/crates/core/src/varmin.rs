//! Constrained minimization of `I(u) = 1/2 int |grad u|^2 - int u` over
//! `{u = 0 on the boundary, int g(u) = 1}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cutoff::CutoffFunction;
use crate::elliptic::{
    assemble_operator_with, solve_torsion_with, BandedLu, BoundaryData, BoundaryScheme,
    CoefficientField, DiscreteOperator, LinearOptions, ScalarField,
};
use crate::geometry::GridDomain;
use crate::quasiconcavity::{symmetry_monotonicity_check, SymmetryReport};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VarminOptions {
    /// Target for the Euler–Lagrange residual `||Lap u + 1 + mu g'(u)||_inf`.
    pub tol: f64,
    pub max_steps: usize,
    /// Precondition the gradient with `(1/tau + K)^-1` instead of taking
    /// explicit steps scaled by the inverse diagonal of `K`.
    pub semi_implicit: bool,
    /// Pseudo-time step of the semi-implicit variant; `None` is `tau = inf`.
    pub tau: Option<f64>,
    /// Constraint accuracy after each restoration.
    pub restore_tol: f64,
    pub scheme: BoundaryScheme,
}

impl Default for VarminOptions {
    fn default() -> Self {
        VarminOptions {
            tol: 1e-6,
            max_steps: 20_000,
            semi_implicit: true,
            tau: None,
            restore_tol: 1e-10,
            scheme: BoundaryScheme::SymmetricCut,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VariationalResult {
    pub u: ScalarField,
    /// Least-squares multiplier of `-(Lap u + 1)` against `g'(u)`.
    pub mu: f64,
    pub energy: f64,
    pub constraint_residual: f64,
    pub el_residual: f64,
    pub iterations: usize,
    /// Scaling with `int g(t_a v) = 1` used for the initial iterate.
    pub t_a: f64,
    /// Torsion function of the same discretization.
    pub torsion: ScalarField,
    /// Energy after every accepted step, starting with the initial iterate.
    pub energy_trace: Vec<f64>,
}

/// `h^2 sum g(u)`.
pub fn constraint_integral(g: &CutoffFunction, u: &ScalarField) -> f64 {
    let h = u.domain().h();
    h * h * u.values().iter().map(|&s| g.value(s.max(0.0))).sum::<f64>()
}

/// `h^2 (1/2 u.Ku - sum u)` with `K = -Lap_h`.
pub fn discrete_energy(op: &DiscreteOperator, u: &[f64]) -> f64 {
    let h = op.domain().h();
    let mut lu = vec![0.0; u.len()];
    op.matvec(u, &mut lu);
    let quad: f64 = u.iter().zip(&lu).map(|(a, b)| -a * b).sum();
    h * h * (0.5 * quad - u.iter().sum::<f64>())
}

/// `t_a` with `int g(t_a v) = 1`, by bisection.
pub fn constraint_scale(v: &ScalarField, g: &CutoffFunction) -> Result<f64> {
    let vmax = v.max();
    if !(vmax > 0.0) {
        return Err(Error::invalid("constraint scaling needs a field that is positive somewhere"));
    }
    let h = v.domain().h();
    let total = |t: f64| h * h * v.values().iter().map(|&s| g.value((t * s).max(0.0))).sum::<f64>();
    let positive_area = h * h * v.values().iter().filter(|s| **s > 0.0).count() as f64;
    if positive_area <= 1.0 {
        return Err(Error::invalid(format!(
            "sup_t int g(t v) = {positive_area:.6} <= 1: domain too small for the constraint"
        )));
    }
    let mut lo = 1.0 / vmax;
    let mut hi = lo;
    let mut doublings = 0;
    while total(hi) < 1.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 {
            return Err(Error::invalid("could not bracket the constraint scale"));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let gm = total(mid);
        if (gm - 1.0).abs() <= 1e-10 {
            return Ok(mid);
        }
        if gm < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::NonConvergence {
        what: "constraint scale bisection",
        iterations: 400,
        achieved: (total(0.5 * (lo + hi)) - 1.0).abs(),
        target: 1e-10,
    })
}

struct Problem<'a> {
    op: &'a DiscreteOperator,
    g: &'a CutoffFunction,
    h2: f64,
}

impl Problem<'_> {
    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; u.len()];
        self.op.matvec(u, &mut r);
        for v in r.iter_mut() {
            *v = -*v - 1.0;
        }
        r
    }

    fn constraint(&self, u: &[f64]) -> f64 {
        self.h2 * u.iter().map(|&s| self.g.value(s)).sum::<f64>()
    }

    fn constraint_gradient(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&s| self.g.derivative(s)).collect()
    }

    /// Moves `u` along `q` (with `g'(u).q >= 0`) until the constraint holds.
    fn restore(&self, u: &mut [f64], q: &[f64], tol: f64) -> Result<()> {
        let phi = |c: f64| -> f64 {
            self.h2
                * u.iter()
                    .zip(q)
                    .map(|(a, b)| self.g.value(a + c * b))
                    .sum::<f64>()
                - 1.0
        };
        let dphi = |c: f64| -> f64 {
            self.h2
                * u.iter()
                    .zip(q)
                    .map(|(a, b)| self.g.derivative(a + c * b) * b)
                    .sum::<f64>()
        };
        let f0 = phi(0.0);
        if f0.abs() <= tol {
            return Ok(());
        }
        let qmax = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if qmax == 0.0 {
            return Err(Error::DegenerateConstraint(0));
        }
        // bracket [lo, hi] with phi(lo) < 0 < phi(hi)
        let mut step = 1e-3 / qmax;
        let (mut lo, mut hi) = if f0 < 0.0 { (0.0, f64::NAN) } else { (f64::NAN, 0.0) };
        let mut probe = 0.0;
        for _ in 0..200 {
            probe += if f0 < 0.0 { step } else { -step };
            let fp = phi(probe);
            if (f0 < 0.0 && fp >= 0.0) || (f0 > 0.0 && fp <= 0.0) {
                if f0 < 0.0 {
                    hi = probe;
                } else {
                    lo = probe;
                }
                break;
            }
            if f0 < 0.0 {
                lo = probe;
            } else {
                hi = probe;
            }
            step *= 2.0;
        }
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::invalid("constraint restoration could not bracket a root"));
        }
        let mut c = 0.5 * (lo + hi);
        // Newton steps safeguarded by bisection
        let mut c_newton = if f0 < 0.0 { lo } else { hi };
        for _ in 0..200 {
            let f = phi(c_newton);
            if f.abs() <= tol {
                c = c_newton;
                break;
            }
            if f < 0.0 {
                lo = c_newton;
            } else {
                hi = c_newton;
            }
            let d = dphi(c_newton);
            let mut next = if d > 0.0 { c_newton - f / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            c_newton = next;
            c = next;
            if hi - lo <= 1e-17 * (1.0 + c.abs()) {
                break;
            }
        }
        for (a, b) in u.iter_mut().zip(q) {
            *a += c * b;
        }
        let res = self.constraint(u) - 1.0;
        if res.abs() > tol {
            return Err(Error::NonConvergence {
                what: "constraint restoration",
                iterations: 200,
                achieved: res.abs(),
                target: tol,
            });
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Projected-gradient descent on the constraint manifold, started from
/// `t_a v_a`.
pub fn constrained_minimize(
    domain: &Arc<GridDomain>,
    g: &CutoffFunction,
    opts: &VarminOptions,
) -> Result<VariationalResult> {
    let lap = CoefficientField::laplacian();
    let op = assemble_operator_with(domain, &lap, opts.scheme)?;
    let direct = LinearOptions {
        method: crate::elliptic::LinearMethod::Direct,
        ..LinearOptions::default()
    };
    let torsion = solve_torsion_with(domain, &lap, opts.scheme, &direct)?;
    let t_a = constraint_scale(&torsion, g)?;
    let u0 = torsion.scaled(t_a);
    minimize_from(&op, g, u0.values().to_vec(), t_a, torsion, opts)
}

fn minimize_from(
    op: &DiscreteOperator,
    g: &CutoffFunction,
    mut u: Vec<f64>,
    t_a: f64,
    torsion: ScalarField,
    opts: &VarminOptions,
) -> Result<VariationalResult> {
    let n = op.len();
    let h = op.domain().h();
    let pb = Problem { op, g, h2: h * h };
    let lu = if opts.semi_implicit {
        let sigma = opts.tau.map_or(0.0, |t| 1.0 / t);
        Some(BandedLu::factor(op, -1.0, &vec![sigma; n])?)
    } else {
        None
    };
    // explicit steps use the damped Jacobi metric, h^2/8 at regular nodes
    let inv_diag: Vec<f64> = op.diagonal().iter().map(|d| -1.0 / d).collect();
    let precondition = |v: &[f64]| -> Vec<f64> {
        match &lu {
            Some(lu) => lu.solve(v),
            None => v.iter().zip(&inv_diag).map(|(a, b)| a * b).collect(),
        }
    };
    let s_max: f64 = if opts.semi_implicit { 1.0 } else { 0.5 };
    let s_min = s_max * 1e-12;

    let g0 = pb.constraint_gradient(&u);
    pb.restore(&mut u, &g0, opts.restore_tol)?;
    let mut energy = discrete_energy(op, &u);
    let mut trace = vec![energy];
    let mut s = s_max;
    let mut iterations = 0;
    let (mu, el) = loop {
        let r = pb.gradient(&u);
        let gp = pb.constraint_gradient(&u);
        let gg = dot(&gp, &gp);
        if gg == 0.0 {
            return Err(Error::DegenerateConstraint(iterations));
        }
        let mu_ls = dot(&r, &gp) / gg;
        let el = r
            .iter()
            .zip(&gp)
            .fold(0.0f64, |m, (a, b)| m.max((a - mu_ls * b).abs()));
        if el <= opts.tol {
            break (mu_ls, el);
        }
        if iterations >= opts.max_steps {
            return Err(Error::NonConvergence {
                what: "constrained minimization",
                iterations,
                achieved: el,
                target: opts.tol,
            });
        }
        iterations += 1;

        let pr = precondition(&r);
        let q = precondition(&gp);
        let mu = dot(&gp, &pr) / dot(&gp, &q);
        let d: Vec<f64> = pr.iter().zip(&q).map(|(a, b)| -a + mu * b).collect();
        if inf_norm(&d) == 0.0 {
            break (mu_ls, el);
        }

        s = (2.0 * s).min(s_max);
        let accepted = loop {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            if pb.restore(&mut trial, &q, opts.restore_tol).is_ok() {
                let e = discrete_energy(op, &trial);
                if e <= energy + 1e-12 {
                    energy = e;
                    break Some(trial);
                }
            }
            s *= 0.5;
            if s < s_min {
                break None;
            }
        };
        match accepted {
            Some(next) => {
                u = next;
                trace.push(energy);
            }
            None => {
                return Err(Error::NonConvergence {
                    what: "constrained minimization line search",
                    iterations,
                    achieved: el,
                    target: opts.tol,
                })
            }
        }
    };

    let field = ScalarField::new(op.domain().clone(), u, BoundaryData::ZERO)?;
    let constraint_residual = (constraint_integral(g, &field) - 1.0).abs();
    Ok(VariationalResult {
        u: field,
        mu,
        energy,
        constraint_residual,
        el_residual: el,
        iterations,
        t_a,
        torsion,
        energy_trace: trace,
    })
}

/// Pass/fail of the bounds a constrained minimizer must satisfy.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub mu_positive: bool,
    /// `min (u - v)`; positive when `v < u` everywhere.
    pub min_gap_to_torsion: f64,
    pub below_torsion_fails: bool,
    /// `max (u - ((1 - y^2)/2 + 2))` with the offending node.
    pub barrier_excess: f64,
    pub barrier_node: Option<(usize, usize)>,
    pub max_u: f64,
    pub constraint_residual: f64,
    pub positive: bool,
    pub symmetry: Option<SymmetryReport>,
}

impl BoundsReport {
    pub fn v_below_u(&self) -> bool {
        !self.below_torsion_fails
    }

    pub fn barrier_ok(&self) -> bool {
        self.barrier_excess < 0.0
    }

    pub fn max_above_one(&self) -> bool {
        self.max_u > 1.0
    }

    pub fn constraint_ok(&self) -> bool {
        self.constraint_residual <= 1e-6
    }

    pub fn symmetric_monotone(&self) -> bool {
        self.symmetry.as_ref().is_some_and(|s| s.passed())
    }

    /// `(name, passed)` for every check.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("mu_positive", self.mu_positive),
            ("torsion_below_minimizer", self.v_below_u()),
            ("barrier", self.barrier_ok()),
            ("max_above_one", self.max_above_one()),
            ("constraint", self.constraint_ok()),
            ("positive", self.positive),
            ("symmetric_monotone", self.symmetric_monotone()),
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }
}

pub fn verify_solution_bounds(
    u: &ScalarField,
    mu: f64,
    g: &CutoffFunction,
    v: &ScalarField,
) -> BoundsReport {
    let d = u.domain();
    let min_gap = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    let mut barrier_excess = f64::NEG_INFINITY;
    let mut barrier_node = None;
    for (k, node) in d.nodes().iter().enumerate() {
        let y = d.point(k).y;
        let e = u.values()[k] - ((1.0 - y * y) / 2.0 + 2.0);
        if e > barrier_excess {
            barrier_excess = e;
            barrier_node = Some((node.i, node.j));
        }
    }
    BoundsReport {
        mu_positive: mu > 0.0,
        min_gap_to_torsion: min_gap,
        below_torsion_fails: !(min_gap > 0.0),
        barrier_excess,
        barrier_node,
        max_u: u.max(),
        constraint_residual: (constraint_integral(g, u) - 1.0).abs(),
        positive: u.min() > 0.0,
        symmetry: symmetry_monotonicity_check(u).ok(),
    }
}

impl VariationalResult {
    pub fn verify(&self, g: &CutoffFunction) -> BoundsReport {
        verify_solution_bounds(&self.u, self.mu, g, &self.torsion)
    }
}
