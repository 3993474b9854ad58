//! Discrete domains: stadiums, disks, rectangles and convex rings on a
//! uniform grid with Shortley–Weller cut fractions.

mod grid;
mod shape;

pub use grid::{
    Arm, Component, Direction, GridDomain, InteriorNode, Region, MIN_CUT_FRACTION,
};
pub use shape::{CapProfile, Shape};

use crate::{Error, Point, Result};

/// Minimum number of grid nodes across the height of a stadium.
pub const MIN_NODES_ACROSS: f64 = 16.0;

/// Stadium `{|y| < 1, |x| < a + phi(y)}`.
pub fn build_stadium(a: f64, cap: CapProfile, h: f64) -> Result<GridDomain> {
    build_domain(Shape::stadium(a, cap), h)
}

pub fn build_disk_domain(center: Point, radius: f64, h: f64) -> Result<GridDomain> {
    build_domain(Shape::disk(center, radius), h)
}

/// Open axis-aligned rectangle `(lo.x, hi.x) x (lo.y, hi.y)`.
pub fn build_rectangle_domain(lo: Point, hi: Point, h: f64) -> Result<GridDomain> {
    build_domain(Shape::rectangle(lo, hi)?, h)
}

/// Any convex outer shape without a hole.
pub fn build_domain(outer: Shape, h: f64) -> Result<GridDomain> {
    check_outer(&outer, h)?;
    Ok(GridDomain::build(outer, None, h))
}

fn check_outer(outer: &Shape, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("grid spacing h = {h} must be positive")));
    }
    match outer {
        Shape::Stadium { a, cap } => {
            if !(*a >= 1.0) || !a.is_finite() {
                return Err(Error::invalid(format!(
                    "stadium half-length a = {a} must be >= 1"
                )));
            }
            if !(cap.stretch() > 0.0) {
                return Err(Error::invalid("cap stretch must be positive"));
            }
            if 2.0 / h < MIN_NODES_ACROSS {
                return Err(Error::invalid(format!(
                    "h = {h} gives fewer than {MIN_NODES_ACROSS} nodes across the stadium height"
                )));
            }
        }
        Shape::Disk { radius, .. } => {
            if !(*radius > 4.0 * h) {
                return Err(Error::invalid(format!(
                    "disk radius {radius} must exceed 4h = {}",
                    4.0 * h
                )));
            }
        }
        Shape::Polygon { .. } => {
            if outer.min_width() < 4.0 * h {
                return Err(Error::invalid("domain narrower than 4h"));
            }
        }
    }
    Ok(())
}

/// Convex ring `outer \ closure(x0 + eps * hole)` on the lattice of `outer`.
pub fn build_ring_domain(
    outer: &Shape,
    x0: Point,
    eps: f64,
    hole: &Shape,
    h: f64,
) -> Result<GridDomain> {
    check_outer(outer, h)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("hole scale eps = {eps} must be positive")));
    }
    let placed = hole.scaled(x0, eps)?;
    let width = placed.min_width();
    if width < 3.0 * h {
        return Err(Error::invalid(format!(
            "hole width {width:.4} is below 3h = {:.4}; refine h to at most {:.3e}",
            3.0 * h,
            width / 3.0
        )));
    }
    let clearance = 2.0 * h;
    let samples = placed.boundary_samples(((placed.area().sqrt() / h) as usize * 8).max(256));
    for p in &samples {
        if outer.level(*p) > -clearance {
            return Err(Error::invalid(format!(
                "hole boundary point ({:.4}, {:.4}) is within 2h of the outer boundary or outside it",
                p.x, p.y
            )));
        }
    }
    let domain = GridDomain::build(outer.clone(), Some(placed), h);
    if !domain.is_connected() {
        return Err(Error::invalid("ring interior is not connected at this resolution"));
    }
    Ok(domain)
}

/// Equally spaced points on the segment `[p, q]`, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSample {
    pub p: Point,
    pub q: Point,
    pub points: Vec<Point>,
}

impl SegmentSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn sample_segment(p: Point, q: Point, n: usize) -> Result<SegmentSample> {
    if n < 2 {
        return Err(Error::invalid("segment sampling needs at least 2 points"));
    }
    let last = (n - 1) as f64;
    let points = (0..n)
        .map(|k| {
            if k == 0 {
                p
            } else if k == n - 1 {
                q
            } else {
                let t = k as f64 / last;
                Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
            }
        })
        .collect();
    Ok(SegmentSample { p, q, points })
}
