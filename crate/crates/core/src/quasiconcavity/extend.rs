use crate::elliptic::ScalarField;
use crate::geometry::{Arm, Component, Direction, GridDomain, Region};
use crate::Point;

/// A field continued to every node of its grid, with one extra layer of
/// padding nodes on each side.
///
/// Exterior nodes next to the domain carry the linear extrapolation
/// through the boundary value at the exact cut point (averaged when several
/// interior neighbours define one); the remaining exterior and hole nodes
/// carry the boundary value of their component.
#[derive(Clone, Debug)]
pub struct ExtendedField {
    /// Padded size.
    nx: usize,
    ny: usize,
    h: f64,
    /// Coordinates of padded node `(0, 0)`.
    x0: f64,
    y0: f64,
    values: Vec<f64>,
    inside_grid: Vec<bool>,
}

impl ExtendedField {
    pub fn new(u: &ScalarField) -> Self {
        let d: &GridDomain = u.domain();
        let (nx, ny) = (d.nx() + 2, d.ny() + 2);
        let bc = u.boundary();
        let mut sum = vec![0.0; d.nx() * d.ny()];
        let mut count = vec![0u32; d.nx() * d.ny()];
        for (k, node) in d.nodes().iter().enumerate() {
            let uk = u.values()[k];
            for dir in Direction::ALL {
                if let Arm::Cut { frac, component } = node.arm(dir) {
                    let (di, dj) = dir.offset();
                    let ni = (node.i as i64 + di) as usize;
                    let nj = (node.j as i64 + dj) as usize;
                    let b = bc.get(*component);
                    sum[nj * d.nx() + ni] += uk + (b - uk) / frac;
                    count[nj * d.nx() + ni] += 1;
                }
            }
        }
        let mut values = vec![0.0; nx * ny];
        let mut inside_grid = vec![false; nx * ny];
        for j in 0..d.ny() {
            for i in 0..d.nx() {
                let idx = (j + 1) * nx + (i + 1);
                inside_grid[idx] = true;
                let flat = j * d.nx() + i;
                values[idx] = match d.region(i, j) {
                    Region::Interior => u.at(i, j).expect("interior node"),
                    _ if count[flat] > 0 => sum[flat] / count[flat] as f64,
                    Region::Exterior => bc.get(Component::Outer),
                    Region::Hole => bc.get(Component::Inner),
                };
            }
        }
        let pad = values
            .iter()
            .zip(&inside_grid)
            .filter(|(_, g)| **g)
            .map(|(v, _)| *v)
            .fold(f64::INFINITY, f64::min);
        for (v, g) in values.iter_mut().zip(&inside_grid) {
            if !*g {
                *v = pad;
            }
        }
        let o = d.origin();
        ExtendedField {
            nx,
            ny,
            h: d.h(),
            x0: o.x - d.h(),
            y0: o.y - d.h(),
            values,
            inside_grid,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Whether padded node `(i, j)` belongs to the original grid.
    pub fn in_grid(&self, i: usize, j: usize) -> bool {
        self.inside_grid[j * self.nx + i]
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        Point::new(self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    /// Bilinear interpolation; points off the padded grid are clamped.
    pub fn eval(&self, p: Point) -> f64 {
        let fx = ((p.x - self.x0) / self.h).clamp(0.0, (self.nx - 1) as f64);
        let fy = ((p.y - self.y0) / self.h).clamp(0.0, (self.ny - 1) as f64);
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v00 = self.value(i, j);
        let v10 = self.value(i + 1, j);
        let v01 = self.value(i, j + 1);
        let v11 = self.value(i + 1, j + 1);
        if tx == 0.0 && ty == 0.0 {
            return v00;
        }
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
    }
}
