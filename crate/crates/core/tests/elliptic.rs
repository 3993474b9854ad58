use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use qclab::elliptic::*;
use qclab::geometry::*;
use qclab::Point;

fn disk(h: f64) -> Arc<GridDomain> {
    Arc::new(build_disk_domain(Point::new(0.0, 0.0), 1.0, h).unwrap())
}

fn square(h: f64) -> Arc<GridDomain> {
    Arc::new(build_rectangle_domain(Point::new(-1.0, -1.0), Point::new(1.0, 1.0), h).unwrap())
}

/// `J0(x)` from its power series.
fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

fn first_bessel_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn torsion_on_disk() {
    let start = Instant::now();
    let d = disk(1.0 / 64.0);
    let v = solve_torsion(&d, &CoefficientField::laplacian()).unwrap();
    let err = (0..d.num_unknowns())
        .map(|k| {
            let p = d.point(k);
            (v.values()[k] - (1.0 - p.x * p.x - p.y * p.y) / 4.0).abs()
        })
        .fold(0.0, f64::max);
    assert!(err <= 5e-4, "torsion error {err}");
    assert!(start.elapsed().as_secs() < 60);
    let (i, j) = d.nearest_node(Point::new(0.0, 0.0));
    assert!((v.at(i, j).unwrap() - 0.25).abs() <= 2.0 * d.h() * d.h());
}

#[test]
fn torsion_direct_and_krylov_agree() {
    let d = disk(1.0 / 32.0);
    let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
    let rhs = ScalarField::new(d.clone(), vec![-1.0; op.len()], BoundaryData::ZERO).unwrap();
    let a = solve_linear_system(&op, &rhs, BoundaryData::ZERO).unwrap();
    let direct = LinearOptions {
        method: LinearMethod::Direct,
        ..LinearOptions::default()
    };
    let b = solve_linear_system_with(&op, &rhs, BoundaryData::ZERO, &direct).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-10);
}

#[test]
fn zero_data_gives_zero() {
    let d = disk(1.0 / 32.0);
    let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
    let u = solve_linear_system(&op, &ScalarField::zeros(d.clone()), BoundaryData::ZERO).unwrap();
    assert!(u.values().iter().all(|v| *v == 0.0));
}

#[test]
fn manufactured_solution_on_square() {
    let h = 1.0 / 32.0;
    let d = square(h);
    let exact = |p: Point| (PI * (p.x + 1.0) / 2.0).sin() * (PI * (p.y + 1.0) / 2.0).sin();
    let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
    let rhs = ScalarField::from_fn(d.clone(), BoundaryData::ZERO, |p| -PI * PI / 2.0 * exact(p));
    let u = solve_linear_system(&op, &rhs, BoundaryData::ZERO).unwrap();
    let err = (0..d.num_unknowns())
        .map(|k| (u.values()[k] - exact(d.point(k))).abs())
        .fold(0.0, f64::max);
    assert!(err < 2.0 * h * h, "error {err}");
}

#[test]
fn shortley_weller_second_order_on_disk() {
    let exact = |p: Point| (p.x).exp() * (2.0 * p.y).cos();
    let err = |h: f64| {
        let d = disk(h);
        let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
        // laplacian of exact is (1 - 4) exact
        let rhs = ScalarField::from_fn(d.clone(), BoundaryData::ZERO, |p| -3.0 * exact(p));
        // nonconstant Dirichlet data: fold boundary values into the rhs
        let mut r = rhs.values().to_vec();
        for (k, node) in d.nodes().iter().enumerate() {
            let p = d.point(k);
            for dir in Direction::ALL {
                if let Arm::Cut { frac, .. } = node.arm(dir) {
                    let (dx, dy) = dir.offset();
                    let q = Point::new(p.x + dx as f64 * frac * h, p.y + dy as f64 * frac * h);
                    let hp = frac * h;
                    let other = match dir {
                        Direction::East => node.arm(Direction::West),
                        Direction::West => node.arm(Direction::East),
                        Direction::North => node.arm(Direction::South),
                        Direction::South => node.arm(Direction::North),
                    }
                    .fraction()
                        * h;
                    r[k] -= 2.0 / (hp * (hp + other)) * exact(q);
                }
            }
        }
        let rhs = ScalarField::new(d.clone(), r, BoundaryData::ZERO).unwrap();
        let u = solve_linear_system(&op, &rhs, BoundaryData::ZERO).unwrap();
        (0..d.num_unknowns())
            .map(|k| (u.values()[k] - exact(d.point(k))).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(1.0 / 16.0), err(1.0 / 32.0));
    let order = (e1 / e2).log2();
    assert!(order >= 1.8, "observed order {order} ({e1}, {e2})");
}

#[test]
fn disk_eigenvalue_matches_bessel_zero() {
    let j = first_bessel_zero();
    assert!((j - 2.404_825_557_695_773).abs() < 1e-12);
    let d = disk(1.0 / 64.0);
    let e = principal_eigenpair(&d, &CoefficientField::laplacian(), None).unwrap();
    assert!((e.lambda1 - j * j).abs() / (j * j) < 0.01, "lambda1 {}", e.lambda1);
    assert!(e.residual <= 1e-8);
    assert!(e.phi.values().iter().all(|v| *v > 0.0));
    assert!((e.phi.max() - 1.0).abs() < 1e-15);
}

#[test]
fn square_eigenvalue_closed_form() {
    let d = square(1.0 / 32.0);
    let e = principal_eigenpair(&d, &CoefficientField::laplacian(), None).unwrap();
    let exact = PI * PI / 2.0;
    assert!((e.lambda1 - exact).abs() / exact < 0.01);
}

#[test]
fn eigenvalue_scales_with_coefficient() {
    let d = disk(1.0 / 32.0);
    let one = principal_eigenpair(&d, &CoefficientField::laplacian(), None).unwrap();
    let two = principal_eigenpair(&d, &CoefficientField::isotropic(2.0), None).unwrap();
    assert!((two.lambda1 - 2.0 * one.lambda1).abs() < 1e-7 * one.lambda1);
}

#[test]
fn zeroth_order_shifts_eigenvalue() {
    let d = disk(1.0 / 32.0);
    let base = principal_eigenpair(&d, &CoefficientField::laplacian(), None).unwrap();
    let zeta = ScalarField::from_fn(d.clone(), BoundaryData::ZERO, |_| 10.0);
    let shifted = principal_eigenpair(&d, &CoefficientField::laplacian(), Some(&zeta)).unwrap();
    assert!((shifted.lambda1 - (base.lambda1 - 10.0)).abs() < 1e-7);
}

#[test]
fn maximum_principle() {
    let d = disk(1.0 / 32.0);
    let op = assemble_operator(&d, &CoefficientField::laplacian().with_drift(0.5, -0.3)).unwrap();
    let rhs = ScalarField::from_fn(d.clone(), BoundaryData::ZERO, |_| -1.0);
    let u = solve_linear_system(&op, &rhs, BoundaryData::ZERO).unwrap();
    assert!(u.min() >= 0.0);
    let rhs2 = ScalarField::from_fn(d.clone(), BoundaryData::ZERO, |_| -1.5);
    let u2 = solve_linear_system(&op, &rhs2, BoundaryData::ZERO).unwrap();
    assert!(u.values().iter().zip(u2.values()).all(|(a, b)| b >= a));
}

#[test]
fn monotone_linear_case_is_torsion() {
    let d = disk(1.0 / 32.0);
    let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
    let psi = solve_torsion(&d, &CoefficientField::laplacian()).unwrap();
    let f = NonlinearitySpec::constant(1.0);
    let sub = ScalarField::zeros(d.clone());
    let sup = psi.scaled(1.1);
    let r = monotone_semilinear_solve(&op, &f, &sub, &sup, BoundaryData::ZERO, &MonotoneOptions::default())
        .unwrap();
    assert!(r.u.max_abs_diff(&psi) < 1e-9);
    assert!(r.sweeps <= 2);
}

#[test]
fn monotone_logistic_two_sided() {
    let d = disk(1.0 / 32.0);
    let lap = CoefficientField::laplacian();
    let op = assemble_operator(&d, &lap).unwrap();
    let f = NonlinearitySpec::logistic(10.0, 2.0).unwrap();
    let zeta = ScalarField::from_fn(d.clone(), BoundaryData::ZERO, |_| 10.0);
    let eig = principal_eigenpair(&d, &lap, Some(&zeta)).unwrap();
    assert!(eig.lambda1 < 0.0);
    let psi = solve_torsion(&d, &lap).unwrap();
    let sub = eig.phi.scaled(0.5);
    let sup = psi.scaled(1.1 * f.upper_bound());
    let r = monotone_semilinear_solve(&op, &f, &sub, &sup, BoundaryData::ZERO, &MonotoneOptions::default())
        .unwrap();
    assert!(r.residual <= 1e-8);
    assert!(r.uniqueness_gap.unwrap() <= 1e-6);
    assert!(r.u.min() > 0.0 && r.u.max() <= 10.0);
}

#[test]
fn harmonic_ring_between_boundary_values() {
    let outer = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let hole = Shape::disk(Point::new(0.0, 0.0), 1.0);
    let d = Arc::new(build_ring_domain(&outer, Point::new(0.3, 0.0), 0.2, &hole, 1.0 / 64.0).unwrap());
    let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
    let m = 3.0;
    let bc = BoundaryData::new(0.0, m);
    let sub = ScalarField::zeros(d.clone());
    let sup = ScalarField::from_fn(d.clone(), BoundaryData::new(m, m), |_| m);
    let r = monotone_semilinear_solve(&op, &NonlinearitySpec::constant(0.0), &sub, &sup, bc, &MonotoneOptions::default())
        .unwrap();
    assert!(r.u.min() > 0.0 && r.u.max() < m);
}

#[test]
fn infeasible_bracket_rejected() {
    let d = disk(1.0 / 32.0);
    let op = assemble_operator(&d, &CoefficientField::laplacian()).unwrap();
    let psi = solve_torsion(&d, &CoefficientField::laplacian()).unwrap();
    let f = NonlinearitySpec::constant(1.0);
    let r = monotone_semilinear_solve(
        &op,
        &f,
        &ScalarField::zeros(d.clone()),
        &psi.scaled(0.5),
        BoundaryData::ZERO,
        &MonotoneOptions::default(),
    );
    assert!(r.is_err());
}

#[test]
fn cross_terms_rejected_at_cut_nodes() {
    let d = disk(1.0 / 16.0);
    let mut c = CoefficientField::laplacian();
    c.a12 = Affine::constant(0.2);
    assert!(assemble_operator(&d, &c).is_err());
}
