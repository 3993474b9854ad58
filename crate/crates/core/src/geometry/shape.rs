use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

/// Cap profile of the stadium ends: `|x| < a + phi(y)` for `|y| < 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CapProfile {
    /// `phi(y) = sqrt(1 - y^2)`: half-disk caps.
    #[default]
    Circular,
    /// `phi(y) = stretch * sqrt(1 - y^2)`: half-ellipse caps.
    Elliptic { stretch: f64 },
}

impl CapProfile {
    pub fn stretch(self) -> f64 {
        match self {
            CapProfile::Circular => 1.0,
            CapProfile::Elliptic { stretch } => stretch,
        }
    }

    /// Concave even profile with `phi(+-1) = 0`; zero outside `[-1, 1]`.
    pub fn eval(self, y: f64) -> f64 {
        let r = 1.0 - y * y;
        if r <= 0.0 {
            0.0
        } else {
            self.stretch() * r.sqrt()
        }
    }
}

/// Convex planar shapes used as outer domains and holes.
///
/// Every shape exposes a level function that is negative inside, zero on
/// the boundary and positive outside. It is exact signed distance only for
/// disks and for interior points of polygons; the grid builder only relies
/// on its sign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Stadium { a: f64, cap: CapProfile },
    Disk { center: Point, radius: f64 },
    /// Convex polygon with counter-clockwise vertices.
    Polygon { vertices: Vec<Point> },
}

impl Shape {
    pub fn stadium(a: f64, cap: CapProfile) -> Self {
        Shape::Stadium { a, cap }
    }

    pub fn disk(center: Point, radius: f64) -> Self {
        Shape::Disk { center, radius }
    }

    /// Convex polygon; the vertex order is normalized to counter-clockwise.
    pub fn polygon(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 vertices"));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for k in 0..n {
            let turn = vertices[k].orient(vertices[(k + 1) % n], vertices[(k + 2) % n]);
            if turn <= 0.0 {
                return Err(Error::invalid("polygon is not strictly convex"));
            }
        }
        Ok(Shape::Polygon { vertices })
    }

    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        Shape::polygon(vec![
            lo,
            Point::new(hi.x, lo.y),
            hi,
            Point::new(lo.x, hi.y),
        ])
    }

    pub fn level(&self, p: Point) -> f64 {
        match self {
            Shape::Stadium { a, cap } => {
                let ay = p.y.abs();
                if ay >= 1.0 {
                    ay - 1.0
                } else {
                    (ay - 1.0).max(p.x.abs() - a - cap.eval(p.y))
                }
            }
            Shape::Disk { center, radius } => p.dist(*center) - radius,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut worst = f64::NEG_INFINITY;
                for k in 0..n {
                    let a = vertices[k];
                    let b = vertices[(k + 1) % n];
                    let len = a.dist(b);
                    // outward normal distance for a CCW polygon
                    let d = -a.orient(b, p) / len;
                    worst = worst.max(d);
                }
                worst
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.level(p) < 0.0
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Shape::Stadium { a, cap } => {
                let xm = a + cap.stretch();
                (Point::new(-xm, -1.0), Point::new(xm, 1.0))
            }
            Shape::Disk { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
            Shape::Polygon { vertices } => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo.x = lo.x.min(v.x);
                    lo.y = lo.y.min(v.y);
                    hi.x = hi.x.max(v.x);
                    hi.y = hi.y.max(v.y);
                }
                (lo, hi)
            }
        }
    }

    /// Exact area of the continuous shape.
    pub fn area(&self) -> f64 {
        match self {
            Shape::Stadium { a, cap } => 4.0 * a + std::f64::consts::PI * cap.stretch(),
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Shape::Polygon { vertices } => signed_area(vertices),
        }
    }

    /// Minimal width across the shape.
    pub fn min_width(&self) -> f64 {
        match self {
            Shape::Stadium { .. } => 2.0,
            Shape::Disk { radius, .. } => 2.0 * radius,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|k| {
                        let a = vertices[k];
                        let b = vertices[(k + 1) % n];
                        let len = a.dist(b);
                        vertices
                            .iter()
                            .map(|v| a.orient(b, *v).abs() / len)
                            .fold(0.0, f64::max)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Points sampled along the boundary curve.
    pub fn boundary_samples(&self, count: usize) -> Vec<Point> {
        let count = count.max(8);
        match self {
            Shape::Disk { center, radius } => (0..count)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / count as f64;
                    Point::new(center.x + radius * t.cos(), center.y + radius * t.sin())
                })
                .collect(),
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let per_edge = count.div_ceil(n);
                let mut out = Vec::with_capacity(per_edge * n);
                for k in 0..n {
                    let a = vertices[k];
                    let b = vertices[(k + 1) % n];
                    for s in 0..per_edge {
                        let t = s as f64 / per_edge as f64;
                        out.push(a * (1.0 - t) + b * t);
                    }
                }
                out
            }
            Shape::Stadium { a, cap } => {
                let quarter = count.div_ceil(4);
                let mut out = Vec::with_capacity(4 * quarter);
                for s in 0..quarter {
                    let x = -a + 2.0 * a * s as f64 / quarter as f64;
                    out.push(Point::new(x, 1.0));
                    out.push(Point::new(-x, -1.0));
                }
                for s in 0..quarter {
                    let t = std::f64::consts::PI * (s as f64 / quarter as f64 - 0.5);
                    let y = t.sin();
                    let x = a + cap.eval(y);
                    out.push(Point::new(x, y));
                    out.push(Point::new(-x, -y));
                }
                out
            }
        }
    }

    /// Image under `p -> center + scale * p`.
    pub fn scaled(&self, center: Point, scale: f64) -> Result<Shape> {
        match self {
            Shape::Disk { center: c, radius } => {
                Ok(Shape::disk(center + *c * scale, radius * scale))
            }
            Shape::Polygon { vertices } => {
                Shape::polygon(vertices.iter().map(|v| center + *v * scale).collect())
            }
            Shape::Stadium { .. } => Err(Error::invalid("stadium holes are not supported")),
        }
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|k| {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}
