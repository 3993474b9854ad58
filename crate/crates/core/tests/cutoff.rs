use proptest::prelude::*;
use qclab::cutoff::*;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn kappa_matches_independent_quadrature() {
    let g = oscillatory_cutoff();
    let integral = simpson(theta, 1.0, 2.0, 2_000_000);
    let oracle = 1.0 / integral;
    let kappa = g.kappa().unwrap();
    assert!((kappa - oracle).abs() / oracle < 1e-8, "{kappa} vs {oracle}");
}

#[test]
fn oscillatory_values_match_quadrature() {
    let g = oscillatory_cutoff();
    let kappa = g.kappa().unwrap();
    for s in [1.1, 1.25, 1.5, 1.77, 1.93] {
        let oracle = kappa * simpson(theta, 1.0, s, 400_000);
        assert!((g.value(s) - oracle).abs() < 1e-10, "s={s}");
    }
}

#[test]
fn oscillatory_second_derivative_changes_sign() {
    let g = oscillatory_cutoff();
    let (mut pos, mut neg) = (false, false);
    for k in 1..=9 {
        let s = 1.0 + 2f64.powi(-k);
        let d2 = g.second_derivative(s);
        pos |= d2 > 0.0;
        neg |= d2 < 0.0;
    }
    assert!(pos && neg);
}

#[test]
fn variants_are_monotone_on_a_grid() {
    for g in [smoothstep_cutoff(), oscillatory_cutoff()] {
        let mut prev = -1.0;
        for k in 0..=3000 {
            let s = 0.5 + 2.0 * k as f64 / 3000.0;
            let v = g.value(s);
            assert!(v >= prev);
            prev = v;
        }
    }
}

fn fd_check(g: &CutoffFunction, s: f64) -> Result<(), TestCaseError> {
    let d = 1e-5;
    let (v, dv) = eval_cutoff(g, s);
    prop_assert!((0.0..=1.0).contains(&v));
    prop_assert!(dv >= 0.0);
    if (s - 1.0).abs() > d && (s - 2.0).abs() > d {
        let fd = (g.value(s + d) - g.value(s - d)) / (2.0 * d);
        prop_assert!((dv - fd).abs() <= 1e-6, "s={} dv={} fd={}", s, dv, fd);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn smoothstep_invariants(s in -1.0f64..4.0) {
        let g = smoothstep_cutoff();
        fd_check(&g, s)?;
        if (1.0..=2.0).contains(&s) {
            prop_assert!((g.value(s) + g.value(3.0 - s) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn oscillatory_invariants(s in -1.0f64..4.0) {
        fd_check(&oscillatory_cutoff(), s)?;
    }
}
