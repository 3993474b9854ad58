use std::sync::{Arc, OnceLock};

use qclab::cutoff::CutoffFunction;
use qclab::elliptic::{solve_torsion_with, BoundaryScheme, CoefficientField, LinearOptions};
use qclab::geometry::{build_stadium, CapProfile, GridDomain};
use qclab::varmin::*;

fn stadium(a: f64, h: f64) -> Arc<GridDomain> {
    Arc::new(build_stadium(a, CapProfile::Circular, h).unwrap())
}

fn run_a8() -> &'static VariationalResult {
    static RUN: OnceLock<VariationalResult> = OnceLock::new();
    RUN.get_or_init(|| {
        constrained_minimize(
            &stadium(8.0, 1.0 / 32.0),
            &CutoffFunction::default(),
            &VarminOptions::default(),
        )
        .unwrap()
    })
}

fn torsion(d: &Arc<GridDomain>) -> qclab::elliptic::ScalarField {
    solve_torsion_with(
        d,
        &CoefficientField::laplacian(),
        BoundaryScheme::SymmetricCut,
        &LinearOptions::default(),
    )
    .unwrap()
}

#[test]
fn scale_meets_the_constraint() {
    let g = CutoffFunction::default();
    let v = torsion(&stadium(8.0, 1.0 / 32.0));
    let t = constraint_scale(&v, &g).unwrap();
    assert!((constraint_integral(&g, &v.scaled(t)) - 1.0).abs() <= 1e-10);
}

#[test]
fn doubling_the_field_halves_the_scale() {
    let g = CutoffFunction::default();
    let v = torsion(&stadium(4.0, 1.0 / 32.0));
    let t = constraint_scale(&v, &g).unwrap();
    let t2 = constraint_scale(&v.scaled(2.0), &g).unwrap();
    assert_eq!(t2, 0.5 * t);
}

#[test]
fn short_stadium_has_a_finite_scale() {
    let g = CutoffFunction::default();
    let v = torsion(&stadium(1.0, 1.0 / 32.0));
    let t = constraint_scale(&v, &g).unwrap();
    assert!(t.is_finite() && t > 0.0);
    // geometric scan: the first grid point past the crossing brackets t
    let mut s = 1e-3;
    while constraint_integral(&g, &v.scaled(s)) < 1.0 {
        s *= 1.01;
    }
    assert!(t <= s && t >= s / 1.01);
}

#[test]
fn minimizer_satisfies_the_bounds() {
    let g = CutoffFunction::default();
    let res = run_a8();
    assert!(res.mu > 0.0);
    assert!(res.el_residual <= 1e-6);
    assert!(res.constraint_residual <= 1e-6);
    let report = res.verify(&g);
    for (name, ok) in report.checks() {
        assert!(ok, "{name} failed: {report:?}");
    }
    assert!(report.max_u > 1.0);
}

#[test]
fn energy_never_increases() {
    let trace = &run_a8().energy_trace;
    assert!(trace.len() > 1);
    for w in trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn torsion_in_place_of_minimizer_fails_the_constraint() {
    let g = CutoffFunction::default();
    let res = run_a8();
    let report = verify_solution_bounds(&res.torsion, res.mu, &g, &res.torsion);
    assert!(!report.constraint_ok());
    assert!(!report.v_below_u());
    assert!(res.torsion.max() < 0.5);
}

#[test]
fn injected_barrier_violation_is_located() {
    let g = CutoffFunction::default();
    let res = run_a8();
    let mut u = res.u.clone();
    let k = u.len() / 3;
    u.values_mut()[k] = 3.0;
    let node = u.domain().node(k);
    let report = verify_solution_bounds(&u, res.mu, &g, &res.torsion);
    assert!(!report.barrier_ok());
    assert_eq!(report.barrier_node, Some((node.i, node.j)));
}

#[test]
fn explicit_and_semi_implicit_agree_on_a_coarse_grid() {
    let d = stadium(2.0, 1.0 / 8.0);
    let g = CutoffFunction::default();
    let semi = constrained_minimize(&d, &g, &VarminOptions::default()).unwrap();
    let explicit = constrained_minimize(
        &d,
        &g,
        &VarminOptions {
            semi_implicit: false,
            max_steps: 200_000,
            ..VarminOptions::default()
        },
    )
    .unwrap();
    assert!(semi.u.max_abs_diff(&explicit.u) < 1e-4);
    assert!((semi.mu - explicit.mu).abs() < 1e-3 * semi.mu.abs().max(1.0));
}
