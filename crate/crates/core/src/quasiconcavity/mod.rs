//! Superlevel sets, convexity certificates and the geometric sanity checks
//! run on computed fields.

mod contour;
mod extend;
mod hull;

use std::sync::Arc;

use serde::Serialize;

pub use contour::{extract_contours, signed_area};
pub use extend::ExtendedField;
pub use hull::convex_hull;

use crate::elliptic::ScalarField;
use crate::{Error, Execution, Point, Result};

/// Default tolerance on the hull deficiency.
pub const DEFAULT_CONVEXITY_TOL: f64 = 5e-3;

/// `{u > lambda}` as a node set and as marching-squares polygons.
#[derive(Clone, Debug)]
pub struct SuperlevelSet {
    pub lambda: f64,
    /// Unknown indices with `u > lambda`.
    pub node_set: Vec<usize>,
    pub contours: Vec<Vec<Point>>,
    field: Arc<ExtendedField>,
    node_points: Vec<Point>,
    node_values: Vec<f64>,
}

impl SuperlevelSet {
    pub fn is_empty(&self) -> bool {
        self.node_set.is_empty()
    }

    /// Area enclosed by the contours (holes counted negatively).
    pub fn area(&self) -> f64 {
        self.contours.iter().map(|c| signed_area(c)).sum()
    }

    pub fn field(&self) -> &ExtendedField {
        &self.field
    }
}

pub fn extract_superlevel(u: &ScalarField, lambda: f64) -> SuperlevelSet {
    extract_superlevel_on(u, Arc::new(ExtendedField::new(u)), lambda)
}

fn extract_superlevel_on(u: &ScalarField, field: Arc<ExtendedField>, lambda: f64) -> SuperlevelSet {
    let d = u.domain();
    let node_set: Vec<usize> = (0..u.len()).filter(|&k| u.values()[k] > lambda).collect();
    let node_points = node_set.iter().map(|&k| d.point(k)).collect();
    let node_values = node_set.iter().map(|&k| u.values()[k]).collect();
    let contours = extract_contours(&field, lambda);
    SuperlevelSet {
        lambda,
        node_set,
        contours,
        field,
        node_points,
        node_values,
    }
}

/// Three collinear points with `u(P) > lambda`, `u(R) > lambda` and
/// `u(Q) < lambda` for `Q` on `[P, R]` (the midpoint for witnesses found by
/// [`convexity_report`]).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub p: Point,
    pub q: Point,
    pub r: Point,
    pub up: f64,
    pub uq: f64,
    pub ur: f64,
}

impl Witness {
    /// Smallest of the three inequality margins.
    pub fn margin(&self, lambda: f64) -> f64 {
        (self.up - lambda).min(self.ur - lambda).min(lambda - self.uq)
    }

    /// Re-evaluates the three values on `field` and checks the inequalities
    /// and the collinearity.
    pub fn verify(&self, field: &ExtendedField, lambda: f64) -> bool {
        let (up, uq, ur) = (field.eval(self.p), field.eval(self.q), field.eval(self.r));
        let scale = self.p.dist(self.r).max(1.0);
        let collinear = self.p.orient(self.q, self.r).abs() <= 1e-12 * scale * scale;
        collinear && up > lambda && ur > lambda && uq < lambda
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub lambda: f64,
    pub is_convex: bool,
    pub hull_deficiency: f64,
    pub set_area: f64,
    pub hull_area: f64,
    pub contour_count: usize,
    pub witness: Option<Witness>,
}

pub fn convexity_report(set: &SuperlevelSet, tol: f64) -> Result<ConvexityReport> {
    if set.is_empty() {
        return Err(Error::invalid(format!(
            "superlevel set at lambda = {} is empty",
            set.lambda
        )));
    }
    let vertices: Vec<Point> = set.contours.iter().flatten().copied().collect();
    let hull = convex_hull(&vertices);
    let hull_area = signed_area(&hull);
    let set_area = set.area();
    let hull_deficiency = if set_area > 0.0 {
        ((hull_area - set_area) / set_area).max(0.0)
    } else {
        f64::INFINITY
    };
    let is_convex = hull_deficiency <= tol;
    let witness = if is_convex { None } else { find_witness(set) };
    Ok(ConvexityReport {
        lambda: set.lambda,
        is_convex,
        hull_deficiency,
        set_area,
        hull_area,
        contour_count: set.contours.len(),
        witness,
    })
}

fn best_pair(set: &SuperlevelSet, candidates: &[usize]) -> Option<Witness> {
    let lambda = set.lambda;
    let mut best: Option<(f64, Witness)> = None;
    for (a, &ka) in candidates.iter().enumerate() {
        for &kb in &candidates[a + 1..] {
            let (p, r) = (set.node_points[ka], set.node_points[kb]);
            let q = p.midpoint(r);
            let uq = set.field.eval(q);
            if uq >= lambda {
                continue;
            }
            let w = Witness {
                p,
                q,
                r,
                up: set.node_values[ka],
                uq,
                ur: set.node_values[kb],
            };
            let m = w.margin(lambda);
            if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
                best = Some((m, w));
            }
        }
    }
    best.map(|b| b.1)
}

fn find_witness(set: &SuperlevelSet) -> Option<Witness> {
    let hull = convex_hull(&set.node_points);
    let mut on_hull: Vec<usize> = Vec::new();
    for v in &hull {
        if let Some(k) = set.node_points.iter().position(|p| p == v) {
            on_hull.push(k);
        }
    }
    if let Some(w) = best_pair(set, &on_hull) {
        return Some(w);
    }
    // nodes of the set with a neighbour outside it
    let f = &set.field;
    let h = f.h();
    let boundary: Vec<usize> = (0..set.node_points.len())
        .filter(|&k| {
            let p = set.node_points[k];
            [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
                .iter()
                .any(|(dx, dy)| f.eval(Point::new(p.x + dx, p.y + dy)) <= set.lambda)
        })
        .collect();
    let stride = boundary.len().div_ceil(300).max(1);
    let sample: Vec<usize> = boundary.into_iter().step_by(stride).collect();
    best_pair(set, &sample)
}

/// Three-point test through `P = (0, (1 - 2e) y_a)`, `R = (a/2, 0)` and the
/// midpoint `Q`, at `lambda` halfway between `u(Q)` and `u(R)`. `None` unless
/// `u(Q) < u(R) < 1 < u(P)`.
pub fn stadium_witness(u: &ScalarField, a: f64, y_a: f64, e: f64) -> Option<(f64, Witness)> {
    let field = ExtendedField::new(u);
    let p = Point::new(0.0, (1.0 - 2.0 * e) * y_a);
    let r = Point::new(0.5 * a, 0.0);
    let q = p.midpoint(r);
    let w = Witness {
        p,
        q,
        r,
        up: field.eval(p),
        uq: field.eval(q),
        ur: field.eval(r),
    };
    (w.uq < w.ur && w.ur < 1.0 && 1.0 < w.up).then_some((0.5 * (w.uq + w.ur), w))
}

/// Reports for a grid of levels.
#[derive(Clone, Debug, Serialize)]
pub struct LevelScan {
    pub reports: Vec<ConvexityReport>,
    /// Smallest and largest level with a non-convex set.
    pub nonconvex_window: Option<(f64, f64)>,
}

impl LevelScan {
    pub fn all_convex(&self) -> bool {
        self.reports.iter().all(|r| r.is_convex)
    }

    /// Non-convex reports with a witness whose level lies in `(lo, hi)`.
    pub fn witnessed_in(&self, lo: f64, hi: f64) -> Vec<&ConvexityReport> {
        self.reports
            .iter()
            .filter(|r| !r.is_convex && r.witness.is_some() && r.lambda > lo && r.lambda < hi)
            .collect()
    }
}

/// `n` equally spaced levels on `[a, b]`.
pub fn level_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn scan_nonconvex_levels(
    u: &ScalarField,
    lambdas: &[f64],
    tol: f64,
    exec: Execution,
) -> Result<LevelScan> {
    if lambdas.len() < 2 {
        return Err(Error::invalid("a level scan needs at least 2 levels"));
    }
    let top = u.max();
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && **l < top)) {
        return Err(Error::invalid(format!(
            "level {l} lies outside (0, max u = {top})"
        )));
    }
    let field = Arc::new(ExtendedField::new(u));
    let reports = exec
        .map(lambdas.to_vec(), |l| {
            convexity_report(&extract_superlevel_on(u, field.clone(), l), tol)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let bad: Vec<f64> = reports
        .iter()
        .filter(|r| !r.is_convex)
        .map(|r| r.lambda)
        .collect();
    let nonconvex_window = if bad.is_empty() {
        None
    } else {
        Some((
            bad.iter().copied().fold(f64::INFINITY, f64::min),
            bad.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    };
    Ok(LevelScan {
        reports,
        nonconvex_window,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SymmetryReport {
    pub max_asymmetry_x: f64,
    pub max_asymmetry_y: f64,
    pub max_monotonicity_violation: f64,
    pub tol: f64,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.max_asymmetry_x <= self.tol
            && self.max_asymmetry_y <= self.tol
            && self.max_monotonicity_violation <= self.tol
    }
}

/// Evenness in `x` and `y` and decrease along grid rays leaving the axes.
pub fn symmetry_monotonicity_check(u: &ScalarField) -> Result<SymmetryReport> {
    let d = u.domain();
    if !d.is_axis_symmetric() {
        return Err(Error::invalid("symmetry check needs a domain symmetric about both axes"));
    }
    let (mut ax, mut ay, mut mono) = (0.0f64, 0.0f64, 0.0f64);
    for (k, node) in d.nodes().iter().enumerate() {
        let v = u.values()[k];
        let mi = d.mirror_i(node.i).expect("symmetric grid");
        let mj = d.mirror_j(node.j).expect("symmetric grid");
        ax = ax.max((v - u.at(mi, node.j).expect("mirror node")).abs());
        ay = ay.max((v - u.at(node.i, mj).expect("mirror node")).abs());
        let p = d.point(k);
        let step_x: i64 = if p.x >= 0.0 { 1 } else { -1 };
        let step_y: i64 = if p.y >= 0.0 { 1 } else { -1 };
        for (di, dj) in [(step_x, 0), (0, step_y)] {
            let ni = node.i as i64 + di;
            let nj = node.j as i64 + dj;
            if let Some(w) = u.at(ni as usize, nj as usize) {
                mono = mono.max(w - v);
            }
        }
    }
    Ok(SymmetryReport {
        max_asymmetry_x: ax,
        max_asymmetry_y: ay,
        max_monotonicity_violation: mono,
        tol: 1e-6,
    })
}

/// `sup |u(x, y) - (1 - y^2)/2|` over nodes with `x` in `[x_lo, x_hi]`.
pub fn profile_deviation(u: &ScalarField, x_lo: f64, x_hi: f64) -> Result<f64> {
    let d = u.domain();
    let mut dev: Option<f64> = None;
    for k in 0..u.len() {
        let p = d.point(k);
        if p.x >= x_lo && p.x <= x_hi {
            let e = (u.values()[k] - 0.5 * (1.0 - p.y * p.y)).abs();
            dev = Some(dev.map_or(e, |m| m.max(e)));
        }
    }
    dev.ok_or_else(|| Error::invalid(format!("no interior nodes with x in [{x_lo}, {x_hi}]")))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SqrtConcavityReport {
    pub passed: bool,
    /// Largest Hessian eigenvalue of `sqrt v` over the tested nodes.
    pub worst_eigenvalue: f64,
    pub worst_point: Point,
    pub tested: usize,
    pub slack: f64,
}

/// Concavity of `sqrt v` from central second differences at nodes whose
/// whole `ceil(margin/h)` neighbourhood is interior.
pub fn sqrt_concavity_check(v: &ScalarField, margin: f64) -> Result<SqrtConcavityReport> {
    let d = v.domain();
    let h = d.h();
    let r = ((margin / h) - 1e-9).ceil().max(1.0) as i64;
    let slack = 1e-3;
    let at = |i: i64, j: i64| -> Option<f64> {
        if i < 0 || j < 0 {
            return None;
        }
        v.at(i as usize, j as usize)
    };
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = Point::new(0.0, 0.0);
    let mut tested = 0;
    for (k, node) in d.nodes().iter().enumerate() {
        let (i, j) = (node.i as i64, node.j as i64);
        let mut clear = true;
        'outer: for dj in -r..=r {
            for di in -r..=r {
                if at(i + di, j + dj).is_none() {
                    clear = false;
                    break 'outer;
                }
            }
        }
        if !clear {
            continue;
        }
        let mut w = [[0.0; 3]; 3];
        for (b, row) in w.iter_mut().enumerate() {
            for (a, cell) in row.iter_mut().enumerate() {
                let val = at(i + a as i64 - 1, j + b as i64 - 1).expect("checked");
                if !(val > 0.0) {
                    return Err(Error::invalid(format!(
                        "nonpositive value {val} inside the margin near ({:.4}, {:.4})",
                        d.point(k).x,
                        d.point(k).y
                    )));
                }
                *cell = val.sqrt();
            }
        }
        tested += 1;
        let wxx = (w[1][2] - 2.0 * w[1][1] + w[1][0]) / (h * h);
        let wyy = (w[2][1] - 2.0 * w[1][1] + w[0][1]) / (h * h);
        let wxy = (w[2][2] - w[0][2] - w[2][0] + w[0][0]) / (4.0 * h * h);
        let m = 0.5 * (wxx + wyy);
        let e = m + (0.25 * (wxx - wyy) * (wxx - wyy) + wxy * wxy).sqrt();
        if e > worst {
            worst = e;
            worst_point = d.point(k);
        }
    }
    if tested == 0 {
        return Err(Error::invalid("no nodes at the requested distance from the boundary"));
    }
    Ok(SqrtConcavityReport {
        passed: worst <= slack,
        worst_eigenvalue: worst,
        worst_point,
        tested,
        slack,
    })
}

/// Extent of `{u > 1}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtentReport {
    pub x_a: f64,
    pub y_a: f64,
    pub empty: bool,
}

pub fn superlevel_extent(u: &ScalarField) -> ExtentReport {
    let set = extract_superlevel(u, 1.0);
    if set.is_empty() {
        return ExtentReport {
            x_a: 0.0,
            y_a: 0.0,
            empty: true,
        };
    }
    let (mut x_a, mut y_a) = (0.0f64, 0.0f64);
    for p in set.contours.iter().flatten().chain(&set.node_points) {
        x_a = x_a.max(p.x.abs());
        y_a = y_a.max(p.y.abs());
    }
    ExtentReport {
        x_a,
        y_a,
        empty: false,
    }
}
