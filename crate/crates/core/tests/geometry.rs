use std::f64::consts::PI;

use proptest::prelude::*;
use qclab::geometry::*;
use qclab::Point;

#[test]
fn circular_stadium_width_at_center_line() {
    let d = build_stadium(1.0, CapProfile::Circular, 1.0 / 32.0).unwrap();
    let (_, j) = d.nearest_node(Point::new(0.0, 0.0));
    let row: Vec<usize> = (0..d.nx()).filter(|&i| d.is_interior(i, j)).collect();
    let first = d.node(d.unknown_at(row[0], j).unwrap());
    let last = d.node(d.unknown_at(*row.last().unwrap(), j).unwrap());
    let h = d.h();
    let left = d.point_at(first.i, j).x - first.arm(Direction::West).fraction() * h;
    let right = d.point_at(last.i, j).x + last.arm(Direction::East).fraction() * h;
    assert!((right - left - 4.0).abs() < 1e-9, "width {}", right - left);
}

#[test]
fn long_stadium_is_symmetric() {
    let d = build_stadium(10.0, CapProfile::Circular, 1.0 / 32.0).unwrap();
    assert!(d.is_axis_symmetric());
    assert!(d.is_connected());
    assert_eq!(d.boundary_component_count(), 1);
}

#[test]
fn stadium_area_matches_closed_form() {
    let d = build_stadium(2.0, CapProfile::Circular, 1.0 / 64.0).unwrap();
    let exact = 8.0 + PI;
    assert!((d.area() - exact).abs() / exact < 0.01);
    assert!((d.cut_corrected_area() - exact).abs() < (d.area() - exact).abs());
}

#[test]
fn stadium_preconditions() {
    assert!(build_stadium(0.5, CapProfile::Circular, 1.0 / 32.0).is_err());
    assert!(build_stadium(2.0, CapProfile::Circular, 0.25).is_err());
    assert!(build_stadium(2.0, CapProfile::Circular, 1.0 / 8.0).is_ok());
}

#[test]
fn disk_area_and_symmetry() {
    let d = build_disk_domain(Point::new(0.0, 0.0), 1.0, 1.0 / 64.0).unwrap();
    assert!((d.area() - PI).abs() / PI < 0.005);
    assert!(d.is_axis_symmetric());
    assert!(build_disk_domain(Point::new(0.0, 0.0), 0.01, 1.0 / 64.0).is_err());
}

#[test]
fn disk_area_converges() {
    let err = |h: f64| {
        let d = build_disk_domain(Point::new(0.0, 0.0), 1.0, h).unwrap();
        (d.cut_corrected_area() - PI).abs()
    };
    let (e1, e2, e3) = (err(1.0 / 16.0), err(1.0 / 32.0), err(1.0 / 64.0));
    assert!(e2 < e1 && e3 < e2, "{e1} {e2} {e3}");
}

#[test]
fn ring_with_offset_hole() {
    let outer = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let hole = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let d = build_ring_domain(&outer, Point::new(0.6, 0.0), 0.05, &hole, 1.0 / 128.0).unwrap();
    assert!(d.is_connected());
    assert_eq!(d.boundary_component_count(), 2);
    let mut sum = Point::new(0.0, 0.0);
    let mut count = 0.0;
    for (k, n) in d.nodes().iter().enumerate() {
        if n.boundary_label() == Some(Component::Inner) {
            sum = sum + d.point(k);
            count += 1.0;
        }
    }
    assert!(count > 0.0);
    let c = sum * (1.0 / count);
    assert!(c.dist(Point::new(0.6, 0.0)) < d.h());
}

#[test]
fn ring_rejects_hole_crossing_boundary() {
    let outer = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let hole = Shape::disk(Point::new(0.0, 0.0), 1.0);
    assert!(build_ring_domain(&outer, Point::new(0.6, 0.0), 0.5, &hole, 1.0 / 64.0).is_err());
    assert!(build_ring_domain(&outer, Point::new(0.6, 0.0), 0.39, &hole, 1.0 / 64.0).is_err());
    assert!(build_ring_domain(&outer, Point::new(0.0, 0.0), 0.005, &hole, 1.0 / 64.0).is_err());
}

#[test]
fn annulus_area() {
    let outer = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let hole = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let d = build_ring_domain(&outer, Point::new(0.0, 0.0), 0.3, &hole, 1.0 / 128.0).unwrap();
    let exact = PI * (1.0 - 0.09);
    assert!((d.area() - exact).abs() / exact < 0.01);
    assert!(d.is_axis_symmetric());
}

#[test]
fn polygon_hole() {
    let outer = Shape::stadium(3.0, CapProfile::Circular);
    let square = Shape::rectangle(Point::new(-1.0, -1.0), Point::new(1.0, 1.0)).unwrap();
    let d = build_ring_domain(&outer, Point::new(1.0, 0.0), 0.2, &square, 1.0 / 64.0).unwrap();
    assert_eq!(d.boundary_component_count(), 2);
    let exact = 12.0 + PI - 0.16;
    assert!((d.cut_corrected_area() - exact).abs() / exact < 0.01);
}

#[test]
fn segment_samples() {
    let s = sample_segment(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 3).unwrap();
    assert_eq!(
        s.points,
        vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0), Point::new(1.0, 0.0)]
    );
    let p = Point::new(0.3, -0.2);
    let s = sample_segment(p, p, 2).unwrap();
    assert_eq!(s.points, vec![p, p]);
    assert!(sample_segment(p, p, 1).is_err());
}

#[test]
fn stadium_segment_midpoint() {
    let (a, cy) = (8.0, 0.7);
    let k = 5;
    let s = sample_segment(Point::new(0.0, cy), Point::new(a / 2.0, 0.0), 2 * k + 1).unwrap();
    let q = s.points[k];
    assert!((q.x - a / 4.0).abs() < 1e-15 && (q.y - cy / 2.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn cut_fractions_in_unit_interval(a in 1.0f64..4.0, inv_h in 10u32..40) {
        let d = build_stadium(a, CapProfile::Circular, 1.0 / inv_h as f64).unwrap();
        for n in d.nodes() {
            for arm in &n.arms {
                let f = arm.fraction();
                prop_assert!(f > 0.0 && f <= 1.0);
            }
        }
        prop_assert!(d.is_axis_symmetric());
    }

    #[test]
    fn segment_spacing_uniform(x0 in -5.0f64..5.0, y0 in -5.0f64..5.0, x1 in -5.0f64..5.0, y1 in -5.0f64..5.0, n in 2usize..50) {
        let (p, q) = (Point::new(x0, y0), Point::new(x1, y1));
        let s = sample_segment(p, q, n).unwrap();
        prop_assert_eq!(s.points[0], p);
        prop_assert_eq!(s.points[n - 1], q);
        let step = p.dist(q) / (n - 1) as f64;
        for w in s.points.windows(2) {
            prop_assert!((w[0].dist(w[1]) - step).abs() < 1e-12);
        }
    }
}

