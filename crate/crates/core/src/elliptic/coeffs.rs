use serde::{Deserialize, Serialize};

use crate::geometry::GridDomain;
use crate::{Error, Point, Result};

/// A scalar coefficient that is affine in position: `c0 + cx x + cy y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Affine {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Affine {
    pub const fn constant(c0: f64) -> Self {
        Affine {
            c0,
            cx: 0.0,
            cy: 0.0,
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.c0 + self.cx * p.x + self.cy * p.y
    }

    pub fn is_constant(&self) -> bool {
        self.cx == 0.0 && self.cy == 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0.0 && self.is_constant()
    }
}

/// Coefficients of `L u = div(A grad u) + b . grad u` with symmetric `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub a11: Affine,
    pub a12: Affine,
    pub a22: Affine,
    pub b1: Affine,
    pub b2: Affine,
}

impl Default for CoefficientField {
    fn default() -> Self {
        Self::laplacian()
    }
}

impl CoefficientField {
    pub fn laplacian() -> Self {
        Self::isotropic(1.0)
    }

    pub fn isotropic(a: f64) -> Self {
        CoefficientField {
            a11: Affine::constant(a),
            a12: Affine::default(),
            a22: Affine::constant(a),
            b1: Affine::default(),
            b2: Affine::default(),
        }
    }

    pub fn with_drift(mut self, b1: f64, b2: f64) -> Self {
        self.b1 = Affine::constant(b1);
        self.b2 = Affine::constant(b2);
        self
    }

    pub fn matrix(&self, p: Point) -> [[f64; 2]; 2] {
        let a12 = self.a12.eval(p);
        [[self.a11.eval(p), a12], [a12, self.a22.eval(p)]]
    }

    /// Drift including the first-order part of `div(A grad u)` coming from
    /// a variable off-diagonal entry.
    pub fn effective_drift(&self, p: Point) -> [f64; 2] {
        [self.b1.eval(p) + self.a12.cy, self.b2.eval(p) + self.a12.cx]
    }

    pub fn has_drift(&self) -> bool {
        !(self.b1.is_zero() && self.b2.is_zero() && self.a12.is_constant())
    }

    pub fn has_cross_terms(&self) -> bool {
        !self.a12.is_zero()
    }

    /// Smallest eigenvalue of `A(p)`.
    pub fn ellipticity_at(&self, p: Point) -> f64 {
        let [[a, b], [_, d]] = self.matrix(p);
        let m = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        m - r
    }

    /// Ellipticity floor over all interior nodes and arm midpoints.
    pub fn ellipticity_floor(&self, domain: &GridDomain) -> f64 {
        let h = domain.h();
        let mut beta = f64::INFINITY;
        for k in 0..domain.num_unknowns() {
            let p = domain.point(k);
            beta = beta.min(self.ellipticity_at(p));
            for (dx, dy) in [(0.5, 0.0), (-0.5, 0.0), (0.0, 0.5), (0.0, -0.5)] {
                beta = beta.min(self.ellipticity_at(Point::new(p.x + dx * h, p.y + dy * h)));
            }
        }
        beta
    }

    /// Largest drift magnitude over the interior nodes.
    pub fn max_drift(&self, domain: &GridDomain) -> f64 {
        (0..domain.num_unknowns())
            .map(|k| {
                let b = self.effective_drift(domain.point(k));
                b[0].abs().max(b[1].abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn check_ellipticity(&self, domain: &GridDomain) -> Result<f64> {
        let beta = self.ellipticity_floor(domain);
        if !(beta > 0.0) {
            return Err(Error::invalid(format!(
                "coefficient matrix is not uniformly elliptic (floor {beta:.3e})"
            )));
        }
        Ok(beta)
    }
}
