//! Marching squares on an [`ExtendedField`].

use std::collections::HashMap;

use super::ExtendedField;
use crate::Point;

/// Closed polylines of `{u = lambda}` oriented with `{u > lambda}` on the
/// left; the first vertex is not repeated at the end.
pub fn extract_contours(field: &ExtendedField, lambda: f64) -> Vec<Vec<Point>> {
    let (nx, ny) = (field.nx(), field.ny());
    // the padding ring closes contours of levels below the whole field
    let inside = |i: usize, j: usize| {
        i > 0 && j > 0 && i + 1 < nx && j + 1 < ny && field.value(i, j) > lambda
    };
    let hid = |i: usize, j: usize| 2 * (j * nx + i);
    let vid = |i: usize, j: usize| 2 * (j * nx + i) + 1;

    let crossing = |a: (usize, usize), b: (usize, usize)| -> Point {
        let (va, vb) = (field.value(a.0, a.1), field.value(b.0, b.1));
        let t = ((lambda - va) / (vb - va)).clamp(0.0, 1.0);
        let pa = field.point(a.0, a.1);
        let pb = field.point(b.0, b.1);
        Point::new(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y))
    };

    // segments as (start edge, end edge), in scan order
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut points: HashMap<usize, Point> = HashMap::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let ins = c.map(|(a, b)| inside(a, b));
            let n_in = ins.iter().filter(|b| **b).count();
            if n_in == 0 || n_in == 4 {
                continue;
            }
            let edges = [hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)];
            // (edge id, leaves the set when walking counter-clockwise)
            let mut cross: Vec<(usize, bool)> = Vec::with_capacity(4);
            for k in 0..4 {
                let (a, b) = (k, (k + 1) % 4);
                if ins[a] != ins[b] {
                    points
                        .entry(edges[k])
                        .or_insert_with(|| crossing(c[a], c[b]));
                    cross.push((edges[k], ins[a]));
                }
            }
            let m = cross.len();
            let joined_saddle = m == 4 && {
                let center = 0.25 * c.iter().map(|&(a, b)| field.value(a, b)).sum::<f64>();
                center > lambda
            };
            for k in 0..m {
                if !cross[k].1 {
                    continue;
                }
                let partner = if joined_saddle { (k + 1) % m } else { (k + m - 1) % m };
                debug_assert!(!cross[partner].1);
                segments.push((cross[k].0, cross[partner].0));
            }
        }
    }

    let mut by_start: HashMap<usize, usize> = HashMap::with_capacity(segments.len());
    for (s, seg) in segments.iter().enumerate() {
        by_start.insert(seg.0, s);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for first in 0..segments.len() {
        if used[first] {
            continue;
        }
        let mut poly = Vec::new();
        let mut s = first;
        while !used[s] {
            used[s] = true;
            poly.push(points[&segments[s].0]);
            match by_start.get(&segments[s].1) {
                Some(&next) => s = next,
                None => break,
            }
        }
        loops.push(poly);
    }
    loops
}

/// Shoelace area; positive for counter-clockwise loops.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|k| {
            let a = poly[k];
            let b = poly[(k + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}
