use serde::{Deserialize, Serialize};

use super::Shape;
use crate::Point;

/// Smallest cut fraction kept on an arm. Nodes closer than this (in units
/// of `h`) to the boundary would give unbounded stencil weights.
pub const MIN_CUT_FRACTION: f64 = 1e-9;

/// Which part of the boundary an arm crosses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    /// The outer boundary (the single boundary of a simply connected domain).
    Outer,
    /// The boundary of the hole of a ring.
    Inner,
}

/// Classification of every lattice node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    /// Outside the outer shape (or on its boundary).
    Exterior,
    /// Inside the closed hole of a ring.
    Hole,
}

/// Grid directions in stencil order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    East,
    West,
    North,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::East,
        Direction::West,
        Direction::North,
        Direction::South,
    ];

    pub fn offset(self) -> (i64, i64) {
        match self {
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
            Direction::North => (0, 1),
            Direction::South => (0, -1),
        }
    }

    /// Point at fraction `t` of the arm of length `h` leaving `p`.
    fn along(self, p: Point, t: f64, h: f64) -> Point {
        match self {
            Direction::East => Point::new(p.x + t * h, p.y),
            Direction::West => Point::new(p.x - t * h, p.y),
            Direction::North => Point::new(p.x, p.y + t * h),
            Direction::South => Point::new(p.x, p.y - t * h),
        }
    }
}

/// One of the four grid arms leaving an interior node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arm {
    /// The neighbour is an interior node with this unknown index.
    Interior(usize),
    /// The boundary is crossed at `frac * h`, `frac` in `(0, 1]`.
    Cut { frac: f64, component: Component },
}

impl Arm {
    /// Arm length in units of `h`.
    pub fn fraction(&self) -> f64 {
        match self {
            Arm::Interior(_) => 1.0,
            Arm::Cut { frac, .. } => *frac,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InteriorNode {
    /// Column and row in the grid.
    pub i: usize,
    pub j: usize,
    /// Arms in [`Direction::ALL`] order.
    pub arms: [Arm; 4],
}

impl InteriorNode {
    pub fn arm(&self, dir: Direction) -> &Arm {
        &self.arms[dir as usize]
    }

    pub fn is_boundary_adjacent(&self) -> bool {
        self.arms.iter().any(|a| matches!(a, Arm::Cut { .. }))
    }

    /// Boundary label of the node: `Inner` wins when the node touches both.
    pub fn boundary_label(&self) -> Option<Component> {
        let mut label = None;
        for arm in &self.arms {
            if let Arm::Cut { component, .. } = arm {
                if *component == Component::Inner {
                    return Some(Component::Inner);
                }
                label = Some(*component);
            }
        }
        label
    }
}

/// Uniform Cartesian grid with interior mask and curved-boundary metadata.
///
/// Nodes sit at integer multiples of `h` (`x = (i0 + i) h`), so domains that
/// are symmetric about the axes produce exactly symmetric masks and cut
/// fractions. Interior nodes are enumerated along the shorter grid axis
/// first, which keeps the bandwidth of assembled operators small.
#[derive(Clone, Debug)]
pub struct GridDomain {
    h: f64,
    i0: i64,
    j0: i64,
    nx: usize,
    ny: usize,
    region: Vec<Region>,
    unknown: Vec<u32>,
    nodes: Vec<InteriorNode>,
    outer: Shape,
    hole: Option<Shape>,
}

const NONE: u32 = u32::MAX;

impl GridDomain {
    pub(crate) fn build(outer: Shape, hole: Option<Shape>, h: f64) -> GridDomain {
        let (lo, hi) = outer.bbox();
        let i_lo = (lo.x / h).floor() as i64 - 1;
        let i_hi = (hi.x / h).ceil() as i64 + 1;
        let j_lo = (lo.y / h).floor() as i64 - 1;
        let j_hi = (hi.y / h).ceil() as i64 + 1;
        let nx = (i_hi - i_lo + 1) as usize;
        let ny = (j_hi - j_lo + 1) as usize;

        let mut region = vec![Region::Exterior; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new((i_lo + i as i64) as f64 * h, (j_lo + j as i64) as f64 * h);
                let in_outer = outer.level(p) < 0.0;
                let in_hole = hole.as_ref().is_some_and(|s| s.level(p) <= 0.0);
                region[j * nx + i] = match (in_outer, in_hole) {
                    (true, false) => Region::Interior,
                    (true, true) => Region::Hole,
                    _ => Region::Exterior,
                };
            }
        }

        let mut unknown = vec![NONE; nx * ny];
        let mut order = Vec::new();
        if nx > ny {
            for i in 0..nx {
                for j in 0..ny {
                    order.push((i, j));
                }
            }
        } else {
            for j in 0..ny {
                for i in 0..nx {
                    order.push((i, j));
                }
            }
        }
        let mut count = 0u32;
        let mut positions = Vec::new();
        for (i, j) in order {
            if region[j * nx + i] == Region::Interior {
                unknown[j * nx + i] = count;
                positions.push((i, j));
                count += 1;
            }
        }

        let nodes = positions
            .iter()
            .map(|&(i, j)| {
                let p = Point::new((i_lo + i as i64) as f64 * h, (j_lo + j as i64) as f64 * h);
                let arms = Direction::ALL.map(|dir| {
                    let (di, dj) = dir.offset();
                    let ni = (i as i64 + di) as usize;
                    let nj = (j as i64 + dj) as usize;
                    let q = nj * nx + ni;
                    if region[q] == Region::Interior {
                        return Arm::Interior(unknown[q] as usize);
                    }
                    if region[q] == Region::Exterior {
                        let frac = bisect_crossing(|t| outer.level(dir.along(p, t, h)));
                        Arm::Cut {
                            frac,
                            component: Component::Outer,
                        }
                    } else {
                        let hs = hole.as_ref().expect("hole node without hole shape");
                        let frac = bisect_crossing(|t| -hs.level(dir.along(p, t, h)));
                        Arm::Cut {
                            frac,
                            component: Component::Inner,
                        }
                    }
                });
                InteriorNode { i, j, arms }
            })
            .collect();

        GridDomain {
            h,
            i0: i_lo,
            j0: j_lo,
            nx,
            ny,
            region,
            unknown,
            nodes,
            outer,
            hole,
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Coordinates of grid node `(0, 0)`.
    pub fn origin(&self) -> Point {
        self.point_at(0, 0)
    }

    /// Lattice indices of grid node `(0, 0)`.
    pub fn lattice_offset(&self) -> (i64, i64) {
        (self.i0, self.j0)
    }

    pub fn outer_shape(&self) -> &Shape {
        &self.outer
    }

    pub fn hole_shape(&self) -> Option<&Shape> {
        self.hole.as_ref()
    }

    pub fn point_at(&self, i: usize, j: usize) -> Point {
        Point::new(
            (self.i0 + i as i64) as f64 * self.h,
            (self.j0 + j as i64) as f64 * self.h,
        )
    }

    pub fn region(&self, i: usize, j: usize) -> Region {
        self.region[j * self.nx + i]
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.region(i, j) == Region::Interior
    }

    /// Unknown index of grid node `(i, j)`, if interior.
    pub fn unknown_at(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        let u = self.unknown[j * self.nx + i];
        (u != NONE).then_some(u as usize)
    }

    pub fn num_unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[InteriorNode] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> &InteriorNode {
        &self.nodes[k]
    }

    pub fn point(&self, k: usize) -> Point {
        let n = &self.nodes[k];
        self.point_at(n.i, n.j)
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.nodes.len()).map(|k| self.point(k)).collect()
    }

    /// Nearest grid node (clamped to the grid).
    pub fn nearest_node(&self, p: Point) -> (usize, usize) {
        let fi = (p.x / self.h).round() as i64 - self.i0;
        let fj = (p.y / self.h).round() as i64 - self.j0;
        (
            fi.clamp(0, self.nx as i64 - 1) as usize,
            fj.clamp(0, self.ny as i64 - 1) as usize,
        )
    }

    /// Discrete area: `h^2` times the number of interior nodes.
    pub fn area(&self) -> f64 {
        self.h * self.h * self.nodes.len() as f64
    }

    /// Area from exact grid-line chord lengths, averaged over both axes.
    ///
    /// Along every grid line the inside length is the sum of half arms of
    /// the interior nodes, with cut arms contributing their full fraction.
    pub fn cut_corrected_area(&self) -> f64 {
        let half = |a: &Arm| match a {
            Arm::Interior(_) => 0.5,
            Arm::Cut { frac, .. } => *frac,
        };
        let mut sx = 0.0;
        let mut sy = 0.0;
        for n in &self.nodes {
            sx += half(&n.arms[0]) + half(&n.arms[1]);
            sy += half(&n.arms[2]) + half(&n.arms[3]);
        }
        0.5 * self.h * self.h * (sx + sy)
    }

    /// Whether the interior nodes form one 4-connected set.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(k) = stack.pop() {
            for arm in &self.nodes[k].arms {
                if let Arm::Interior(m) = arm {
                    if !seen[*m] {
                        seen[*m] = true;
                        count += 1;
                        stack.push(*m);
                    }
                }
            }
        }
        count == n
    }

    /// Number of 8-connected clusters of boundary-adjacent interior nodes.
    pub fn boundary_component_count(&self) -> usize {
        let n = self.nodes.len();
        let adjacent: Vec<bool> = self.nodes.iter().map(|x| x.is_boundary_adjacent()).collect();
        let mut seen = vec![false; n];
        let mut clusters = 0;
        for start in 0..n {
            if !adjacent[start] || seen[start] {
                continue;
            }
            clusters += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(k) = stack.pop() {
                let (i, j) = (self.nodes[k].i as i64, self.nodes[k].j as i64);
                for dj in -1..=1 {
                    for di in -1..=1 {
                        let (ni, nj) = (i + di, j + dj);
                        if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
                            continue;
                        }
                        if let Some(m) = self.unknown_at(ni as usize, nj as usize) {
                            if adjacent[m] && !seen[m] {
                                seen[m] = true;
                                stack.push(m);
                            }
                        }
                    }
                }
            }
        }
        clusters
    }

    /// Column index of the mirror image `x -> -x`, if it lies on the grid.
    pub fn mirror_i(&self, i: usize) -> Option<usize> {
        let m = -(self.i0 + i as i64) - self.i0;
        (0..self.nx as i64).contains(&m).then_some(m as usize)
    }

    /// Row index of the mirror image `y -> -y`, if it lies on the grid.
    pub fn mirror_j(&self, j: usize) -> Option<usize> {
        let m = -(self.j0 + j as i64) - self.j0;
        (0..self.ny as i64).contains(&m).then_some(m as usize)
    }

    /// Whether the region map is invariant under `x -> -x` and `y -> -y`.
    pub fn is_axis_symmetric(&self) -> bool {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (Some(mi), Some(mj)) = (self.mirror_i(i), self.mirror_j(j)) else {
                    return false;
                };
                let r = self.region(i, j);
                if r != self.region(mi, j) || r != self.region(i, mj) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `other` lives on the same lattice (same `h`, offsets, size).
    pub fn same_lattice(&self, other: &GridDomain) -> bool {
        self.h == other.h
            && self.i0 == other.i0
            && self.j0 == other.j0
            && self.nx == other.nx
            && self.ny == other.ny
    }

    /// Grid nodes of `self` that are interior in both domains, as pairs of
    /// unknown indices `(self, other)`.
    pub fn common_unknowns(&self, other: &GridDomain) -> Vec<(usize, usize)> {
        assert!(self.same_lattice(other), "domains on different lattices");
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(k, n)| other.unknown_at(n.i, n.j).map(|m| (k, m)))
            .collect()
    }
}

/// Root of `f` on `(0, 1]` with `f(0) < 0 <= f(1)`.
fn bisect_crossing(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).clamp(MIN_CUT_FRACTION, 1.0)
}
