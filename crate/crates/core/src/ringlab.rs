//! Convex rings `Omega_1 \ closure(x0 + eps omega_2)` with a large value
//! `M` on the hole, solved by monotone iteration, and the segment-dip
//! witness against quasiconcavity of the extension by `M`.

use std::sync::Arc;

use serde::Serialize;

use crate::elliptic::{
    assemble_operator, feasibility_residuals, monotone_semilinear_solve, principal_eigenpair_of,
    BoundaryData, CoefficientField, DiscreteOperator, EigenOptions, EigenPair, LinearMethod,
    LinearOptions, MonotoneOptions, MonotoneResult, NonlinearitySpec, ScalarField,
};
use crate::geometry::{build_disk_domain, build_ring_domain, Component, GridDomain, Shape};
use crate::quasiconcavity::{
    convexity_report, extract_superlevel, ConvexityReport, ExtendedField, Witness,
    DEFAULT_CONVEXITY_TOL,
};
use crate::{Error, Execution, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingOptions {
    pub monotone: MonotoneOptions,
    pub linear: LinearOptions,
    /// Feasibility tolerance of the sub- and supersolution checks.
    pub tol_feas: f64,
    /// Safety factor on `D`.
    pub d_inflation: f64,
    /// Minimum margin for a dip along the witness segment.
    pub dip_margin: f64,
}

impl Default for RingOptions {
    fn default() -> Self {
        RingOptions {
            monotone: MonotoneOptions::default(),
            linear: LinearOptions {
                method: LinearMethod::Direct,
                ..LinearOptions::default()
            },
            tol_feas: 1e-6,
            d_inflation: 1.1,
            dip_margin: 1e-6,
        }
    }
}

/// Subsolution seed: the principal eigenfunction on `Omega_1` when
/// `f(., 0) = 0`, otherwise the eigenfunction of a ball inside `Omega_1`
/// extended by zero.
#[derive(Clone, Debug)]
pub enum SubSeed {
    Eigen(EigenPair),
    Ball {
        center: Point,
        radius: f64,
        pair: EigenPair,
        /// Eigenfunction transferred to `Omega_1`.
        phi: ScalarField,
    },
}

impl SubSeed {
    pub fn phi(&self) -> &ScalarField {
        match self {
            SubSeed::Eigen(e) => &e.phi,
            SubSeed::Ball { phi, .. } => phi,
        }
    }
}

/// Solution `v` of the base problem on `Omega_1`.
#[derive(Clone, Debug)]
pub struct BaseSolution {
    pub omega1: Arc<GridDomain>,
    pub coeffs: CoefficientField,
    pub f: NonlinearitySpec,
    pub v: ScalarField,
    /// `M0 = max v`.
    pub m0: f64,
    /// `lambda_1(-L - zeta)` when `f(., 0) = 0`.
    pub lambda1: Option<f64>,
    /// Torsion function `L psi = -1`.
    pub psi: ScalarField,
    pub seed: SubSeed,
    /// `C = sup f`.
    pub c: f64,
    pub delta: f64,
    pub d: f64,
    pub monotone: MonotoneResult,
}

fn torsion(op: &DiscreteOperator, opts: &LinearOptions) -> Result<ScalarField> {
    let rhs = ScalarField::new(op.domain().clone(), vec![-1.0; op.len()], BoundaryData::ZERO)?;
    crate::elliptic::solve_linear_system_with(op, &rhs, BoundaryData::ZERO, opts)
}

fn sample_points(d: &GridDomain) -> Vec<Point> {
    let stride = (d.num_unknowns() / 16).max(1);
    (0..d.num_unknowns()).step_by(stride).map(|k| d.point(k)).collect()
}

/// Halves `delta` until `delta * phi` is a subsolution lying below `sup`.
fn choose_delta(
    op: &DiscreteOperator,
    f: &NonlinearitySpec,
    phi: &ScalarField,
    sup: &ScalarField,
    bc: BoundaryData,
    start: f64,
    tol_feas: f64,
) -> Result<(f64, ScalarField)> {
    let mut delta = start;
    for _ in 0..80 {
        let sub = phi.scaled(delta).with_boundary(BoundaryData::ZERO);
        let below = sub.values().iter().zip(sup.values()).all(|(a, b)| a <= b);
        if below && feasibility_residuals(op, f, &sub, sup, bc).sub_min >= -tol_feas {
            return Ok((delta, sub));
        }
        delta *= 0.5;
    }
    Err(Error::invalid("no feasible subsolution scale delta was found"))
}

pub fn solve_base_problem(
    omega1: &Arc<GridDomain>,
    coeffs: &CoefficientField,
    f: &NonlinearitySpec,
    opts: &RingOptions,
) -> Result<BaseSolution> {
    if omega1.hole_shape().is_some() {
        return Err(Error::invalid("the base problem is posed on a domain without a hole"));
    }
    let op = assemble_operator(omega1, coeffs)?;
    let samples = sample_points(omega1);
    f.check_ratio_monotone(&samples)?;
    let c = f.upper_bound();
    if !c.is_finite() {
        return Err(Error::Hypothesis("f must be bounded from above".into()));
    }
    let psi = torsion(&op, &opts.linear)?;
    let d = opts.d_inflation * c.max(f64::MIN_POSITIVE);
    let sup = psi.scaled(d);

    let (seed, lambda1) = if f.vanishes_at_zero() {
        let zeta: Vec<f64> = omega1
            .points()
            .iter()
            .map(|p| f.zeta(*p).unwrap_or(0.0))
            .collect();
        let eig = principal_eigenpair_of(&op, &zeta, &EigenOptions::default())?;
        if eig.lambda1 >= 0.0 {
            let zmax = zeta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::Hypothesis(format!(
                "lambda_1(-L - zeta) = {:.6} >= 0 (lambda_1(-L) = {:.6} for zeta = {zmax}): \
                 f(x,0) = 0 requires lim f(s)/s > lambda_1(-L)",
                eig.lambda1,
                eig.lambda1 + zmax
            )));
        }
        let l = eig.lambda1;
        (SubSeed::Eigen(eig), Some(l))
    } else {
        let p0 = omega1.points();
        let f0 = p0.iter().map(|p| f.eval(*p, 0.0)).fold(f64::INFINITY, f64::min);
        if f0 < 0.0 {
            return Err(Error::Hypothesis(
                "f(x, 0) must be either identically zero or nonnegative".into(),
            ));
        }
        (ball_seed(omega1, coeffs, &psi)?, None)
    };
    let start = 0.1 * c.max(1.0) / seed.phi().max();
    let (delta, sub) = choose_delta(&op, f, seed.phi(), &sup, BoundaryData::ZERO, start, opts.tol_feas)?;
    let mono = MonotoneOptions {
        tol_feas: opts.tol_feas,
        ..opts.monotone
    };
    let monotone = monotone_semilinear_solve(&op, f, &sub, &sup, BoundaryData::ZERO, &mono)?;
    let v = monotone.u.clone();
    Ok(BaseSolution {
        omega1: omega1.clone(),
        coeffs: coeffs.clone(),
        f: f.clone(),
        m0: v.max(),
        v,
        lambda1,
        psi,
        seed,
        c,
        delta,
        d,
        monotone,
    })
}

fn ball_seed(omega1: &Arc<GridDomain>, coeffs: &CoefficientField, psi: &ScalarField) -> Result<SubSeed> {
    let center = omega1.point(psi.argmax());
    let h = omega1.h();
    let dist = -omega1.outer_shape().level(center);
    let radius = (0.5 * dist).max(5.0 * h);
    if radius >= dist {
        return Err(Error::invalid("Omega_1 is too thin for a ball subsolution"));
    }
    let ball = Arc::new(build_disk_domain(center, radius, h)?);
    let op = assemble_operator(&ball, coeffs)?;
    let pair = principal_eigenpair_of(&op, &vec![0.0; op.len()], &EigenOptions::default())?;
    let phi = pair.phi.transfer_to(omega1, 0.0).with_boundary(BoundaryData::ZERO);
    Ok(SubSeed::Ball {
        center,
        radius,
        pair,
        phi,
    })
}

/// Walks from the maximum of `v` along `+x` until `v <= ratio * max v`,
/// keeping `clearance` from the boundary of `Omega_1`.
pub fn select_hole_center(v: &ScalarField, ratio: f64, clearance: f64) -> Result<Point> {
    let d = v.domain();
    let top = v.max();
    if !(top > 0.0) {
        return Err(Error::invalid("hole center selection needs max v > 0"));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("ratio {ratio} must lie in (0, 1)")));
    }
    let start = d.node(v.argmax());
    let j = start.j;
    for i in start.i..d.nx() {
        let Some(val) = v.at(i, j) else { break };
        if val <= ratio * top {
            let p = d.point_at(i, j);
            if -d.outer_shape().level(p) < clearance {
                return Err(Error::invalid(format!(
                    "v reaches {ratio} max v only within {clearance} of the boundary"
                )));
            }
            return Ok(p);
        }
    }
    Err(Error::invalid(
        "v is too flat: no point on the +x ray from the maximum reaches the ratio",
    ))
}

/// Ring problem data.
#[derive(Clone, Debug)]
pub struct RingProblem {
    pub x0: Point,
    pub eps: f64,
    pub hole: Shape,
    /// Value on the inner boundary.
    pub m: f64,
}

#[derive(Clone, Debug)]
pub struct RingSolution {
    pub ring: Arc<GridDomain>,
    pub x0: Point,
    pub eps: f64,
    pub m: f64,
    pub u_eps: ScalarField,
    /// `u_eps` on `Omega_1`, equal to `M` on the hole nodes.
    pub ubar: ScalarField,
    pub sub: ScalarField,
    pub sup: ScalarField,
    pub delta: f64,
    pub d: f64,
    pub monotone: MonotoneResult,
}

impl RingSolution {
    pub fn uniqueness_gap(&self) -> f64 {
        self.monotone.uniqueness_gap.unwrap_or(f64::NAN)
    }

    /// `min(u - sub)` and `min(sup - u)` over every downward sweep.
    pub fn bracket_margins(&self) -> (f64, f64) {
        (self.monotone.min_margin_sub, self.monotone.min_margin_super)
    }
}

pub fn solve_ring_problem(
    base: &BaseSolution,
    problem: &RingProblem,
    opts: &RingOptions,
) -> Result<RingSolution> {
    if problem.m < base.m0 {
        return Err(Error::invalid(format!(
            "inner value M = {} is below M0 = max v = {}",
            problem.m, base.m0
        )));
    }
    let omega1 = &base.omega1;
    let ring = Arc::new(build_ring_domain(
        omega1.outer_shape(),
        problem.x0,
        problem.eps,
        &problem.hole,
        omega1.h(),
    )?);
    let op = assemble_operator(&ring, &base.coeffs)?;
    let bc = BoundaryData::new(0.0, problem.m);
    let psi = base.psi.transfer_to(&ring, 0.0);
    let min_inner = ring
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.boundary_label() == Some(Component::Inner))
        .map(|(k, _)| psi.values()[k])
        .fold(f64::INFINITY, f64::min);
    if !(min_inner > 0.0) {
        return Err(Error::invalid("torsion function vanishes next to the hole"));
    }
    let d = opts.d_inflation * base.c.max(problem.m / min_inner);
    let sup = psi.scaled(d).with_boundary(bc);
    let phi = base.seed.phi().transfer_to(&ring, 0.0);
    let start = 0.1 * problem.m / phi.max();
    let (delta, sub) = choose_delta(&op, &base.f, &phi, &sup, bc, start, opts.tol_feas)?;
    let mono = MonotoneOptions {
        tol_feas: opts.tol_feas,
        range_top: Some(problem.m),
        ..opts.monotone
    };
    let monotone = monotone_semilinear_solve(&op, &base.f, &sub, &sup, bc, &mono)?;
    let u_eps = monotone.u.clone();
    let ubar = u_eps
        .transfer_to(omega1, problem.m)
        .with_boundary(BoundaryData::ZERO);
    Ok(RingSolution {
        ring,
        x0: problem.x0,
        eps: problem.eps,
        m: problem.m,
        u_eps,
        ubar,
        sub,
        sup,
        delta,
        d,
        monotone,
    })
}

/// Largest distance from the origin to the boundary of the unscaled hole.
fn hole_radius(hole: &Shape) -> f64 {
    match hole {
        Shape::Disk { center, radius } => center.norm() + radius,
        Shape::Polygon { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Shape::Stadium { a, cap } => a + cap.stretch(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    /// `max |ubar - v|` outside `B(x0, r0)`.
    pub gap: f64,
    pub sweeps: usize,
    pub uniqueness_gap: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub r0: f64,
    pub rows: Vec<ConvergenceRow>,
    pub solutions: Vec<RingSolution>,
}

impl ConvergenceStudy {
    /// Whether the gap strictly decreases as `eps` decreases.
    pub fn strictly_decreasing(&self) -> bool {
        let mut rows: Vec<&ConvergenceRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }

    /// Row with the smallest `eps`.
    pub fn smallest(&self) -> Option<(&ConvergenceRow, &RingSolution)> {
        self.rows
            .iter()
            .zip(&self.solutions)
            .min_by(|a, b| a.0.eps.total_cmp(&b.0.eps))
    }
}

/// `max |w - v|` over the nodes of `Omega_1` outside `B(x0, r0)`.
pub fn exterior_gap(w: &ScalarField, v: &ScalarField, x0: Point, r0: f64) -> f64 {
    let d = v.domain();
    (0..v.len())
        .filter(|&k| d.point(k).dist(x0) >= r0)
        .map(|k| (w.values()[k] - v.values()[k]).abs())
        .fold(0.0, f64::max)
}

pub fn epsilon_convergence_study(
    base: &BaseSolution,
    x0: Point,
    hole: &Shape,
    m: f64,
    eps_list: &[f64],
    r0: f64,
    opts: &RingOptions,
    exec: Execution,
) -> Result<ConvergenceStudy> {
    if eps_list.is_empty() {
        return Err(Error::invalid("empty eps list"));
    }
    let largest = eps_list.iter().copied().fold(0.0, f64::max) * hole_radius(hole);
    if !(r0 > largest) {
        return Err(Error::invalid(format!(
            "exclusion radius {r0} must exceed the largest hole radius {largest}"
        )));
    }
    let solutions = exec
        .map(eps_list.to_vec(), |eps| {
            solve_ring_problem(
                base,
                &RingProblem {
                    x0,
                    eps,
                    hole: hole.clone(),
                    m,
                },
                opts,
            )
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows = solutions
        .iter()
        .map(|s| ConvergenceRow {
            eps: s.eps,
            gap: exterior_gap(&s.ubar, &base.v, x0, r0),
            sweeps: s.monotone.sweeps,
            uniqueness_gap: s.uniqueness_gap(),
        })
        .collect();
    Ok(ConvergenceStudy {
        r0,
        rows,
        solutions,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RingWitness {
    pub lambda: f64,
    /// `p` near `x0` with `ubar = M`, `q` the dip, `r = y`.
    pub witness: Witness,
    pub dip: Point,
    pub dip_value: f64,
    /// `min(M, ubar(y))`.
    pub top: f64,
    pub y: Point,
    pub confirmation: ConvexityReport,
}

/// Looks for a dip of `field` along `[x0, y]`, `y` the argmax of `v`.
///
/// Returns `Ok(None)` when the sampled profile has no dip below
/// `min(top_value, field(y))` by more than `margin`.
pub fn segment_dip_witness(
    field: &ScalarField,
    v: &ScalarField,
    x0: Point,
    top_value: f64,
    margin: f64,
) -> Result<Option<RingWitness>> {
    let ext = ExtendedField::new(field);
    let d = field.domain();
    let y = v.domain().point(v.argmax());
    let n = ((x0.dist(y) / d.h()).ceil() as usize * 4).max(8) + 1;
    let seg = crate::geometry::sample_segment(x0, y, n)?;
    let vals: Vec<f64> = seg.points.iter().map(|p| ext.eval(*p)).collect();
    let top = top_value.min(vals[n - 1]);
    let (kmin, m) = vals
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    if !(m < top - margin) || kmin == 0 || kmin == n - 1 {
        return Ok(None);
    }
    let lambda = 0.5 * (m + top);
    // last sample before the dip still at the hole value
    let kp = (0..kmin)
        .rev()
        .find(|&k| vals[k] >= top_value - 1e-12)
        .unwrap_or(0);
    let (p, q, r) = (seg.points[kp], seg.points[kmin], seg.points[n - 1]);
    let witness = Witness {
        p,
        q,
        r,
        up: ext.eval(p),
        uq: ext.eval(q),
        ur: ext.eval(r),
    };
    if !witness.verify(&ext, lambda) {
        return Ok(None);
    }
    let confirmation = convexity_report(&extract_superlevel(field, lambda), DEFAULT_CONVEXITY_TOL)?;
    Ok(Some(RingWitness {
        lambda,
        witness,
        dip: seg.points[kmin],
        dip_value: m,
        top,
        y,
        confirmation,
    }))
}

pub fn ring_nonconvexity_witness(
    sol: &RingSolution,
    v: &ScalarField,
    margin: f64,
) -> Result<Option<RingWitness>> {
    segment_dip_witness(&sol.ubar, v, sol.x0, sol.m, margin)
}
